//! Comment text normalization, character shingling and Jaccard distance.

mod stopwords;

use std::cmp::Ordering;

use unicode_general_category::{get_general_category, GeneralCategory};

pub use stopwords::{Stopwords, DEFAULT_STOPWORDS};

pub const DEFAULT_MIN_LENGTH: usize = 25;
pub const DEFAULT_SHINGLE_WINDOW: usize = 3;

/// Base of the polynomial rolling hash.
pub const HASH_BASE: u64 = 257;
/// Mersenne prime 2^61 - 1.
pub const HASH_MODULUS: u64 = (1 << 61) - 1;

/// Settings for turning raw comment text into shingle sets.
#[derive(Debug, Clone)]
pub struct Normalizer {
    pub stopwords: Stopwords,
    pub min_length: usize,
    pub shingle_window: usize,
}

impl Default for Normalizer {
    fn default() -> Self {
        Self {
            stopwords: Stopwords::english(),
            min_length: DEFAULT_MIN_LENGTH,
            shingle_window: DEFAULT_SHINGLE_WINDOW,
        }
    }
}

impl Normalizer {
    pub fn normalize(&self, text: &str) -> Option<String> {
        normalize_comment(text, &self.stopwords, self.min_length)
    }

    /// Runs the full pipeline; `None` when the comment is too short.
    pub fn process(&self, text: &str) -> Option<(String, ShingleSet)> {
        let modified = self.normalize(text)?;
        let shingles = shingle(&modified, self.shingle_window);
        Some((modified, shingles))
    }
}

fn is_stripped(c: char) -> bool {
    use GeneralCategory::*;
    matches!(
        get_general_category(c),
        ConnectorPunctuation
            | DashPunctuation
            | OpenPunctuation
            | ClosePunctuation
            | InitialPunctuation
            | FinalPunctuation
            | OtherPunctuation
            | MathSymbol
            | CurrencySymbol
            | ModifierSymbol
            | OtherSymbol
    )
}

/// Basic Latin, Latin-1 Supplement, Latin Extended-A and Extended-B.
fn is_latin_block(c: char) -> bool {
    (c as u32) <= 0x024F
}

pub(crate) fn strip_punctuation(token: &str) -> String {
    token.chars().filter(|&c| !is_stripped(c)).collect()
}

/// Tokenizes, strips punctuation and symbols, lowercases, removes stopwords
/// and tokens containing non-Latin letters, then joins with single spaces.
///
/// Returns `None` when the joined text is shorter than `min_length` characters.
pub fn normalize_comment(text: &str, stopwords: &Stopwords, min_length: usize) -> Option<String> {
    let mut out = String::with_capacity(text.len());
    for raw in text.split_whitespace() {
        let token = strip_punctuation(raw).to_lowercase();
        if token.is_empty() || stopwords.contains(&token) {
            continue;
        }
        if token.chars().any(|c| c.is_alphabetic() && !is_latin_block(c)) {
            continue;
        }
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&token);
    }
    (out.chars().count() >= min_length).then_some(out)
}

/// Sorted, deduplicated set of shingle hashes.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ShingleSet(Vec<u64>);

impl ShingleSet {
    pub fn from_hashes<I: IntoIterator<Item = u64>>(hashes: I) -> Self {
        let mut v: Vec<u64> = hashes.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, h: u64) -> bool {
        self.0.binary_search(&h).is_ok()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn intersection_len(&self, other: &ShingleSet) -> usize {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }
}

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % HASH_MODULUS as u128) as u64
}

/// Polynomial hash of `chars` computed from scratch:
/// `sum(c_i * BASE^(w-1-i)) mod (2^61 - 1)` over Unicode scalar values.
pub fn polynomial_hash(chars: &[char]) -> u64 {
    chars
        .iter()
        .fold(0, |h, &c| (mulmod(h, HASH_BASE) + c as u64) % HASH_MODULUS)
}

/// Rabin-Karp rolling hashes of every `window`-character substring, in order.
pub fn rolling_hashes(text: &str, window: usize) -> Vec<u64> {
    assert!(window >= 1, "shingle window must be at least 1");
    let chars: Vec<char> = text.chars().collect();
    if chars.len() < window {
        return Vec::new();
    }
    // BASE^(window-1), weight of the outgoing character
    let lead = (1..window).fold(1u64, |p, _| mulmod(p, HASH_BASE));
    let mut h = polynomial_hash(&chars[..window]);
    let mut out = Vec::with_capacity(chars.len() - window + 1);
    out.push(h);
    for i in window..chars.len() {
        let outgoing = mulmod(chars[i - window] as u64, lead);
        h = (h + HASH_MODULUS - outgoing) % HASH_MODULUS;
        h = (mulmod(h, HASH_BASE) + chars[i] as u64) % HASH_MODULUS;
        out.push(h);
    }
    out
}

pub fn shingle(modified_text: &str, window: usize) -> ShingleSet {
    ShingleSet::from_hashes(rolling_hashes(modified_text, window))
}

/// `1 - |a ∩ b| / |a ∪ b|`, with two empty sets at distance 1.
pub fn jaccard_distance(a: &ShingleSet, b: &ShingleSet) -> f64 {
    let inter = a.intersection_len(b);
    let union = a.len() + b.len() - inter;
    if union == 0 {
        return 1.0;
    }
    1.0 - inter as f64 / union as f64
}
