use std::collections::HashSet;
use std::path::Path;

/// The shipped English stopword list, one word per line.
pub const DEFAULT_STOPWORDS: &str = include_str!("stopwords_en.txt");

/// Stopword set. Entries go through the same punctuation stripping and
/// lowercasing as comment tokens, so `don't` also removes `dont`.
#[derive(Debug, Clone, Default)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    pub fn english() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// One word per line; blank lines and `#` comments are ignored.
    pub fn parse(list: &str) -> Self {
        let words = list
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|w| super::strip_punctuation(w).to_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        Self(words)
    }

    pub fn from_file(path: &Path) -> std::io::Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(token)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}
