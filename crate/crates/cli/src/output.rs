//! Tabular output in CSV, TSV or aligned text, and atomic file writes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use hapax::Result;
use tempfile::NamedTempFile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Tsv,
    Table,
}

/// Header plus rows of already formatted cells.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        let all = std::iter::once(&self.header).chain(&self.rows);
        match format {
            Format::Csv => all.map(|r| r.join(",") + "\n").collect(),
            Format::Tsv => all.map(|r| r.join("\t") + "\n").collect(),
            Format::Table => {
                let cols = self.header.len();
                let widths: Vec<usize> = (0..cols)
                    .map(|c| {
                        std::iter::once(&self.header)
                            .chain(&self.rows)
                            .filter_map(|r| r.get(c))
                            .map(|s| s.chars().count())
                            .max()
                            .unwrap_or(0)
                    })
                    .collect();
                all.map(|r| {
                    let cells: Vec<String> = r
                        .iter()
                        .enumerate()
                        .map(|(c, s)| format!("{s:>w$}", w = widths.get(c).copied().unwrap_or(0)))
                        .collect();
                    cells.join("  ") + "\n"
                })
                .collect()
            }
        }
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir)?;
    let mut tmp = NamedTempFile::new_in(&dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// File extension matching a format.
pub fn extension(format: Format) -> &'static str {
    match format {
        Format::Tsv => "tsv",
        Format::Csv | Format::Table => "csv",
    }
}
