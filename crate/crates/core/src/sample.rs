use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::BufRead;

use crate::{Error, Result, Symbol};

pub type Word = Vec<Symbol>;

/// A bag of words. Multiplicities matter for training; measures that need
/// a set use [`Sample::distinct`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sample {
    bag: BTreeMap<Word, usize>,
}

impl Sample {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, w: Word) {
        self.insert_n(w, 1);
    }

    pub fn insert_n(&mut self, w: Word, n: usize) {
        if n > 0 {
            *self.bag.entry(w).or_insert(0) += n;
        }
    }

    /// Build a sample from space-separated words; `""` is the empty word.
    pub fn from_strs<'a>(words: impl IntoIterator<Item = &'a str>) -> Self {
        words.into_iter().map(parse_word).collect()
    }

    /// Parse the line format: one word per line, symbols separated by
    /// whitespace, an empty line for `ε`, `#` for comment lines.
    pub fn parse_lines(text: &str) -> Result<Self> {
        Self::read(text.as_bytes())
    }

    pub fn read(reader: impl BufRead) -> Result<Self> {
        let mut s = Sample::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::SampleFormat {
                line: i + 1,
                msg: e.to_string(),
            })?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.trim_start().starts_with('#') {
                continue;
            }
            for (col, tok) in line.split_whitespace().enumerate() {
                if !is_token(tok) {
                    return Err(Error::SampleFormat {
                        line: i + 1,
                        msg: format!("invalid symbol {tok:?} at field {}", col + 1),
                    });
                }
            }
            s.insert(parse_word(line));
        }
        Ok(s)
    }

    /// Render in the line format, repeating each word by its multiplicity.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for (w, &n) in &self.bag {
            let line = render_word(w);
            for _ in 0..n {
                let _ = writeln!(out, "{line}");
            }
        }
        out
    }

    /// Distinct words in sorted order.
    pub fn words(&self) -> impl Iterator<Item = &Word> + '_ {
        self.bag.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, usize)> + '_ {
        self.bag.iter().map(|(w, &n)| (w, n))
    }

    pub fn multiplicity(&self, w: &[Symbol]) -> usize {
        self.bag.get(w).copied().unwrap_or(0)
    }

    /// Total number of words counting multiplicities.
    pub fn len(&self) -> usize {
        self.bag.values().sum()
    }

    pub fn distinct(&self) -> usize {
        self.bag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bag.is_empty()
    }

    pub fn alphabet(&self) -> BTreeSet<Symbol> {
        self.bag.keys().flatten().cloned().collect()
    }

    pub fn max_len(&self) -> usize {
        self.bag.keys().map(Vec::len).max().unwrap_or(0)
    }
}

impl FromIterator<Word> for Sample {
    fn from_iter<I: IntoIterator<Item = Word>>(iter: I) -> Self {
        let mut s = Sample::new();
        iter.into_iter().for_each(|w| s.insert(w));
        s
    }
}

impl Extend<Word> for Sample {
    fn extend<I: IntoIterator<Item = Word>>(&mut self, iter: I) {
        iter.into_iter().for_each(|w| self.insert(w));
    }
}

fn is_token(tok: &str) -> bool {
    let mut cs = tok.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == ':' || c == '.')
}

pub(crate) fn parse_word(line: &str) -> Word {
    line.split_whitespace().map(Symbol::new).collect()
}

pub(crate) fn render_word(w: &[Symbol]) -> String {
    w.iter().map(Symbol::as_str).collect::<Vec<_>>().join(" ")
}
