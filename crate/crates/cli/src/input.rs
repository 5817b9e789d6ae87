//! Loading texts, frequency lists and spectra.

use std::fs;
use std::io::BufReader;
use std::path::Path;

use clap::ValueEnum;
use hapax::corpus::{
    count_frequencies, normalize_bytes, spectrum_of, FrequencyList, FrequencySpectrum, TextEncoding, TokenSequence,
};
use hapax::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InputKind {
    /// By extension: `.csv` spectrum, `.tsv` frequency list, anything else text.
    Auto,
    Text,
    FreqList,
    Spectrum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Encoding {
    Utf8,
    Latin1,
}

impl From<Encoding> for TextEncoding {
    fn from(e: Encoding) -> Self {
        match e {
            Encoding::Utf8 => TextEncoding::Utf8,
            Encoding::Latin1 => TextEncoding::Latin1,
        }
    }
}

/// A loaded input. Raw texts keep their tokens for incremental curves.
pub struct Loaded {
    /// File name without directories, used in reports.
    pub name: String,
    pub spectrum: FrequencySpectrum,
    pub frequencies: Option<FrequencyList>,
    pub tokens: Option<TokenSequence>,
}

fn resolve(path: &Path, kind: InputKind) -> InputKind {
    if kind != InputKind::Auto {
        return kind;
    }
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("csv") => InputKind::Spectrum,
        Some("tsv") => InputKind::FreqList,
        _ => InputKind::Text,
    }
}

pub fn load(path: &Path, kind: InputKind, encoding: Encoding) -> Result<Loaded> {
    let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
    match resolve(path, kind) {
        InputKind::Spectrum => {
            let spectrum = FrequencySpectrum::read_csv(BufReader::new(fs::File::open(path)?))?;
            Ok(Loaded { name, spectrum, frequencies: None, tokens: None })
        }
        InputKind::FreqList => {
            let freqs = FrequencyList::read_tsv(BufReader::new(fs::File::open(path)?))?;
            Ok(Loaded { name, spectrum: spectrum_of(&freqs), frequencies: Some(freqs), tokens: None })
        }
        InputKind::Text | InputKind::Auto => {
            let tokens = normalize_bytes(&fs::read(path)?, encoding.into())?;
            let freqs = count_frequencies(&tokens);
            Ok(Loaded { name, spectrum: spectrum_of(&freqs), frequencies: Some(freqs), tokens: Some(tokens) })
        }
    }
}

/// File name with its last extension removed.
pub fn stem(name: &str) -> &str {
    match name.rfind('.') {
        Some(i) if i > 0 => &name[..i],
        _ => name,
    }
}
