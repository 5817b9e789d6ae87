//! Text ingestion and empirical frequency statistics.
//!
//! Raw text is projected onto the 26 ASCII letters and a space: letters are
//! lowercased, everything else (digits, punctuation, accented letters) is a
//! separator. From the resulting tokens we build frequency lists, frequency
//! spectra (`v_k`, the number of types seen exactly `k` times), rank tables
//! (`r_f`, the number of types seen at least `f` times) and the incremental
//! type/hapax curves `G(n)`, `G(n|1)` over prefixes of the text.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{argument, Error, Result};

/// Character encoding of raw text input.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TextEncoding {
    /// Strict UTF-8; invalid sequences are an error.
    #[default]
    Utf8,
    /// ISO-8859-1. Every byte decodes, non-ASCII bytes become separators.
    Latin1,
}

/// Normalized tokens of a text.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TokenSequence {
    tokens: Vec<String>,
}

impl TokenSequence {
    /// Wraps already-normalized tokens, checking that each is a nonempty
    /// run of lowercase ASCII letters.
    pub fn from_tokens(tokens: Vec<String>) -> Result<Self> {
        for (i, t) in tokens.iter().enumerate() {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_lowercase()) {
                return Err(argument(format!("token {i} ({t:?}) is not a lowercase letter run")));
            }
        }
        Ok(Self { tokens })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str)
    }

    /// The first `n` tokens (or all of them if the text is shorter).
    pub fn prefix(&self, n: usize) -> TokenSequence {
        TokenSequence { tokens: self.tokens[..n.min(self.tokens.len())].to_vec() }
    }

    /// Tokens joined by single spaces, i.e. the normalized text.
    pub fn to_text(&self) -> String {
        self.tokens.join(" ")
    }
}

fn push_tokens(chars: impl Iterator<Item = char>, out: &mut Vec<String>) {
    let mut current = String::new();
    for c in chars {
        if c.is_ascii_alphabetic() {
            current.push(c.to_ascii_lowercase());
        } else if !current.is_empty() {
            out.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
}

/// Normalizes a string: ASCII letters are lowercased, every other character
/// acts as a space, tokens are the maximal letter runs.
pub fn normalize_str(text: &str) -> TokenSequence {
    let mut tokens = Vec::new();
    push_tokens(text.chars(), &mut tokens);
    TokenSequence { tokens }
}

/// Normalizes raw UTF-8 bytes.
pub fn normalize_text(raw: &[u8]) -> Result<TokenSequence> {
    normalize_bytes(raw, TextEncoding::Utf8)
}

/// Normalizes raw bytes in the given encoding.
pub fn normalize_bytes(raw: &[u8], encoding: TextEncoding) -> Result<TokenSequence> {
    match encoding {
        TextEncoding::Utf8 => match std::str::from_utf8(raw) {
            Ok(s) => Ok(normalize_str(s)),
            Err(e) => Err(Error::InputEncoding { offset: e.valid_up_to() }),
        },
        TextEncoding::Latin1 => {
            let mut tokens = Vec::new();
            push_tokens(raw.iter().map(|&b| b as char), &mut tokens);
            Ok(TokenSequence { tokens })
        }
    }
}

/// Word frequencies `f(w)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FrequencyList {
    entries: HashMap<String, u64>,
}

impl FrequencyList {
    /// Builds a list from `(word, count)` pairs. Counts must be positive and
    /// words unique and nonempty.
    pub fn from_entries<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut map = HashMap::new();
        for (w, f) in entries {
            let w = w.into();
            if w.is_empty() {
                return Err(argument("empty word in frequency list"));
            }
            if f == 0 {
                return Err(argument(format!("word {w:?} has zero frequency")));
            }
            if map.insert(w.clone(), f).is_some() {
                return Err(argument(format!("duplicate word {w:?}")));
            }
        }
        Ok(Self { entries: map })
    }

    pub fn get(&self, word: &str) -> Option<u64> {
        self.entries.get(word).copied()
    }

    /// Number of types.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of tokens, the sum of all frequencies.
    pub fn tokens(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.entries.iter().map(|(w, &f)| (w.as_str(), f))
    }

    /// Entries by decreasing frequency, ties broken alphabetically.
    pub fn sorted(&self) -> Vec<(&str, u64)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v
    }

    /// Parses the `word<TAB>count` format, one record per line.
    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Self> {
        let mut map = HashMap::new();
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let malformed = |message: String| Error::Malformed { line: line_no, message };
            let (word, count) = line.split_once('\t').ok_or_else(|| malformed("expected word<TAB>count".into()))?;
            if word.is_empty() {
                return Err(malformed("empty word".into()));
            }
            let count: u64 =
                count.trim().parse().map_err(|_| malformed(format!("count {count:?} is not a nonnegative integer")))?;
            if count == 0 {
                return Err(malformed(format!("word {word:?} has zero count")));
            }
            if map.insert(word.to_string(), count).is_some() {
                return Err(malformed(format!("duplicate word {word:?}")));
            }
        }
        Ok(Self { entries: map })
    }

    /// Writes the `word<TAB>count` format, most frequent first.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (w, f) in self.sorted() {
            let _ = writeln!(out, "{w}\t{f}");
        }
        out
    }
}

/// Counts token occurrences.
pub fn count_frequencies(tokens: &TokenSequence) -> FrequencyList {
    let mut entries: HashMap<String, u64> = HashMap::new();
    for t in tokens.iter() {
        match entries.get_mut(t) {
            Some(c) => *c += 1,
            None => {
                entries.insert(t.to_string(), 1);
            }
        }
    }
    FrequencyList { entries }
}

/// Frequency spectrum `k ↦ v_k` with the derived token and type counts.
///
/// Only nonzero `v_k` are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FrequencySpectrum {
    counts: BTreeMap<u64, u64>,
    tokens: u64,
    types: u64,
}

impl FrequencySpectrum {
    /// Builds a spectrum from `(k, v_k)` pairs; repeated `k` accumulate.
    pub fn from_counts<I: IntoIterator<Item = (u64, u64)>>(pairs: I) -> Result<Self> {
        let mut counts = BTreeMap::new();
        for (k, vk) in pairs {
            if k == 0 {
                return Err(argument("spectrum index k must be at least 1"));
            }
            if vk > 0 {
                *counts.entry(k).or_insert(0) += vk;
            }
        }
        Ok(Self::from_map(counts))
    }

    fn from_map(counts: BTreeMap<u64, u64>) -> Self {
        let types = counts.values().sum();
        let tokens = counts.iter().map(|(k, v)| k * v).sum();
        Self { counts, tokens, types }
    }

    /// Token count `n = Σ k v_k`.
    pub fn tokens(&self) -> u64 {
        self.tokens
    }

    /// Type count `v = Σ v_k`.
    pub fn types(&self) -> u64 {
        self.types
    }

    /// `v_k`, zero when absent.
    pub fn get(&self, k: u64) -> u64 {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    pub fn hapaxes(&self) -> u64 {
        self.get(1)
    }

    /// Largest occupied frequency, 0 for an empty spectrum.
    pub fn max_frequency(&self) -> u64 {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Nonzero `(k, v_k)` pairs in increasing `k`.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    /// Parses the `k,v_k` CSV format.
    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        match lines.next() {
            Some((_, header)) => {
                let header = header?;
                if header.trim().replace(' ', "") != "k,v_k" {
                    return Err(Error::Malformed {
                        line: 1,
                        message: format!("expected header \"k,v_k\", found {header:?}"),
                    });
                }
            }
            None => return Err(Error::Malformed { line: 1, message: "missing header".into() }),
        }
        let mut counts = BTreeMap::new();
        let mut last_k = 0u64;
        for (idx, line) in lines {
            let line_no = idx + 1;
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let malformed = |message: String| Error::Malformed { line: line_no, message };
            let (k, vk) = line.split_once(',').ok_or_else(|| malformed("expected k,v_k".into()))?;
            let k: u64 = k.trim().parse().map_err(|_| malformed(format!("bad k {k:?}")))?;
            let vk: u64 = vk.trim().parse().map_err(|_| malformed(format!("bad v_k {vk:?}")))?;
            if k <= last_k {
                return Err(malformed(format!("k must increase strictly (got {k} after {last_k})")));
            }
            last_k = k;
            if vk > 0 {
                counts.insert(k, vk);
            }
        }
        Ok(Self::from_map(counts))
    }

    /// Writes the `k,v_k` CSV format (nonzero rows only).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,v_k\n");
        for (k, v) in self.iter() {
            let _ = writeln!(out, "{k},{v}");
        }
        out
    }
}

/// Tallies a frequency list into a spectrum.
pub fn spectrum_of(freqs: &FrequencyList) -> FrequencySpectrum {
    let mut counts = BTreeMap::new();
    for (_, f) in freqs.iter() {
        *counts.entry(f).or_insert(0) += 1;
    }
    FrequencySpectrum::from_map(counts)
}

/// Rank function `f ↦ r_f`: the number of types with frequency at least `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankTable {
    // ranks[f - 1] = r_f for f = 1 ..= max frequency + 1
    ranks: Vec<u64>,
}

impl RankTable {
    /// `r_f`; zero beyond the maximal frequency, `r_0` is taken as `r_1`.
    pub fn get(&self, f: u64) -> u64 {
        let idx = f.max(1) as usize - 1;
        self.ranks.get(idx).copied().unwrap_or(0)
    }

    /// Largest `f` held explicitly (maximal frequency + 1).
    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// `(f, r_f)` for `f = 1 ..= max frequency + 1`.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.ranks.iter().enumerate().map(|(i, &r)| (i as u64 + 1, r))
    }
}

/// Rank table via `r_f = v - Σ_{k<f} v_k`.
pub fn rank_table(spectrum: &FrequencySpectrum) -> RankTable {
    let max_f = spectrum.max_frequency() as usize;
    let mut ranks = Vec::with_capacity(max_f + 1);
    let mut r = spectrum.types();
    for f in 1..=max_f as u64 + 1 {
        ranks.push(r);
        r -= spectrum.get(f);
    }
    RankTable { ranks }
}

/// Type and hapax counts over prefixes of a text.
#[derive(Clone, Debug, PartialEq)]
pub struct IncrementalCurves {
    pub grid: Vec<u64>,
    pub type_counts: Vec<u64>,
    pub hapax_counts: Vec<u64>,
    pub hapax_rates: Vec<f64>,
}

/// Counts `G(n)` and `G(n|1)` at each grid point in one pass over the tokens.
///
/// The grid must be strictly increasing with values in `1 ..= tokens.len()`.
pub fn incremental_curves(tokens: &TokenSequence, grid: &[u64]) -> Result<IncrementalCurves> {
    let n = tokens.len() as u64;
    if let Some(&first) = grid.first() {
        if first == 0 {
            return Err(argument("grid points must be at least 1"));
        }
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(argument("grid must be strictly increasing"));
    }
    if let Some(&last) = grid.last() {
        if last > n {
            return Err(argument(format!("grid point {last} exceeds text length {n}")));
        }
    }
    let mut seen: HashMap<&str, u32> = HashMap::new();
    let mut hapaxes = 0u64;
    let mut out = IncrementalCurves {
        grid: grid.to_vec(),
        type_counts: Vec::with_capacity(grid.len()),
        hapax_counts: Vec::with_capacity(grid.len()),
        hapax_rates: Vec::with_capacity(grid.len()),
    };
    let mut next = grid.iter().peekable();
    for (i, t) in tokens.iter().enumerate() {
        let c = seen.entry(t).or_insert(0);
        *c += 1;
        match *c {
            1 => hapaxes += 1,
            2 => hapaxes -= 1,
            _ => {}
        }
        let pos = i as u64 + 1;
        while next.peek().is_some_and(|&&g| g == pos) {
            next.next();
            let types = seen.len() as u64;
            out.type_counts.push(types);
            out.hapax_counts.push(hapaxes);
            out.hapax_rates.push(hapaxes as f64 / types as f64);
        }
    }
    Ok(out)
}

/// Integer grid with about `per_decade` log-spaced points from 1 to `n`,
/// always including `n`.
pub fn log_grid(n: u64, per_decade: u32) -> Vec<u64> {
    if n == 0 {
        return Vec::new();
    }
    let per_decade = per_decade.max(1) as f64;
    let steps = ((n as f64).log10() * per_decade).floor() as u64;
    let mut grid: Vec<u64> =
        (0..=steps).map(|i| 10f64.powf(i as f64 / per_decade).round() as u64).filter(|&g| g >= 1 && g <= n).collect();
    grid.push(n);
    grid.dedup();
    grid
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(words: &[&str]) -> TokenSequence {
        TokenSequence::from_tokens(words.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(normalize_text(b"The cat, the CAT!").unwrap(), toks(&["the", "cat", "the", "cat"]));
        assert!(normalize_text(b"").unwrap().is_empty());
        assert_eq!(normalize_text(b"don't stop").unwrap(), toks(&["don", "t", "stop"]));
        assert_eq!(normalize_str("caf\u{e9} na\u{ef}ve x2y"), toks(&["caf", "na", "ve", "x", "y"]));
    }

    #[test]
    fn invalid_utf8_is_an_encoding_error() {
        let r = normalize_text(b"abc \xff def");
        assert!(matches!(r, Err(Error::InputEncoding { offset: 4 })), "{r:?}");
        let latin = normalize_bytes(b"abc \xe9t\xe9 def", TextEncoding::Latin1).unwrap();
        assert_eq!(latin, toks(&["abc", "t", "def"]));
    }

    #[test]
    fn token_validation() {
        assert!(TokenSequence::from_tokens(vec!["Abc".into()]).is_err());
        assert!(TokenSequence::from_tokens(vec![String::new()]).is_err());
    }

    #[test]
    fn frequency_and_spectrum_examples() {
        let t = toks(&["the", "cat", "and", "the", "dog", "and", "the", "bird"]);
        let f = count_frequencies(&t);
        assert_eq!(f.get("the"), Some(3));
        assert_eq!(f.get("and"), Some(2));
        assert_eq!(f.get("bird"), Some(1));
        assert_eq!(f.len(), 5);
        assert_eq!(f.tokens(), 8);
        let s = spectrum_of(&f);
        assert_eq!((s.get(1), s.get(2), s.get(3)), (3, 1, 1));
        assert_eq!((s.tokens(), s.types()), (8, 5));

        let single = spectrum_of(&count_frequencies(&toks(&["a"])));
        assert_eq!((single.get(1), single.tokens(), single.types()), (1, 1, 1));

        let empty = spectrum_of(&count_frequencies(&TokenSequence::default()));
        assert!(empty.is_empty());
        assert_eq!((empty.tokens(), empty.types(), empty.max_frequency()), (0, 0, 0));
    }

    #[test]
    fn rank_table_examples() {
        let s = FrequencySpectrum::from_counts([(1, 3), (2, 1), (3, 1)]).unwrap();
        let r = rank_table(&s);
        assert_eq!((r.get(1), r.get(2), r.get(3), r.get(4)), (5, 2, 1, 0));

        let s = FrequencySpectrum::from_counts([(1, 2), (2, 1)]).unwrap();
        let r = rank_table(&s);
        assert_eq!((r.get(1), r.get(2)), (3, 1));
        assert!(r.get(2) as f64 <= s.tokens() as f64 / 2.0);
    }

    #[test]
    fn incremental_examples() {
        let t = toks(&["a", "b", "a", "c"]);
        let c = incremental_curves(&t, &[1, 2, 3, 4]).unwrap();
        assert_eq!(c.type_counts, vec![1, 2, 2, 3]);
        assert_eq!(c.hapax_counts, vec![1, 2, 1, 2]);

        let same = toks(&["x", "x", "x"]);
        let c = incremental_curves(&same, &[1, 2, 3]).unwrap();
        assert_eq!(c.type_counts, vec![1, 1, 1]);
        assert_eq!(c.hapax_rates, vec![1.0, 0.0, 0.0]);

        assert!(incremental_curves(&t, &[1, 5]).is_err());
        assert!(incremental_curves(&t, &[2, 2]).is_err());
        assert!(incremental_curves(&t, &[0, 2]).is_err());
    }

    #[test]
    fn frequency_list_tsv_errors_carry_line_numbers() {
        let ok = FrequencyList::read_tsv("the\t3\ncat\t1\n".as_bytes()).unwrap();
        assert_eq!(ok.tokens(), 4);
        let bad = FrequencyList::read_tsv("the\t3\ncat 1\n".as_bytes());
        assert!(matches!(bad, Err(Error::Malformed { line: 2, .. })), "{bad:?}");
        let bad = FrequencyList::read_tsv("the\t3\ncat\tx\n".as_bytes());
        assert!(matches!(bad, Err(Error::Malformed { line: 2, .. })));
        let bad = FrequencyList::read_tsv("the\t3\nthe\t1\n".as_bytes());
        assert!(matches!(bad, Err(Error::Malformed { line: 2, .. })));
        let bad = FrequencyList::read_tsv("the\t0\n".as_bytes());
        assert!(matches!(bad, Err(Error::Malformed { line: 1, .. })));
    }

    #[test]
    fn spectrum_csv_parsing() {
        let s = FrequencySpectrum::read_csv("k,v_k\n1,2\n2,0\n5,1\n".as_bytes()).unwrap();
        assert_eq!((s.get(1), s.get(5), s.tokens(), s.types()), (2, 1, 7, 3));
        assert_eq!(s.to_csv(), "k,v_k\n1,2\n5,1\n");
        assert!(matches!(
            FrequencySpectrum::read_csv("k,v_k\n2,1\n1,1\n".as_bytes()),
            Err(Error::Malformed { line: 3, .. })
        ));
        assert!(matches!(FrequencySpectrum::read_csv("x,y\n".as_bytes()), Err(Error::Malformed { line: 1, .. })));
    }

    #[test]
    fn log_grid_includes_endpoint() {
        let g = log_grid(1000, 10);
        assert_eq!(g.first(), Some(&1));
        assert_eq!(g.last(), Some(&1000));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(log_grid(1, 50), vec![1]);
        assert!(log_grid(0, 50).is_empty());
    }
}
