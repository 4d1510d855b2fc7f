//! Finite digit strings indexing frame elements.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A canonical word: empty, or ending in a nonzero digit.
///
/// Words order by length first and lexicographically within a length,
/// which is the order [`enumerate_words`] produces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(digits: Vec<usize>) -> Result<Self> {
        if digits.last() == Some(&0) {
            return Err(Error::NonCanonicalWord(digits));
        }
        Ok(Word(digits))
    }

    /// Strips trailing zeros. Idempotent.
    pub fn canonicalize(digits: &[usize]) -> Self {
        let end = digits.iter().rposition(|&d| d != 0).map_or(0, |i| i + 1);
        Word(digits[..end].to_vec())
    }

    pub fn digits(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn check_alphabet(&self, alphabet: usize) -> Result<()> {
        check_digits(&self.0, alphabet)
    }
}

pub(crate) fn check_digits(digits: &[usize], alphabet: usize) -> Result<()> {
    match digits.iter().find(|&&d| d >= alphabet) {
        Some(&digit) => Err(Error::DigitOutOfRange { digit, alphabet }),
        None => Ok(()),
    }
}

impl AsRef<[usize]> for Word {
    fn as_ref(&self) -> &[usize] {
        &self.0
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("()");
        }
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All digit strings of exactly `len` digits over `{0, ..., alphabet - 1}`,
/// in lexicographic order.
pub fn all_words_of_length(alphabet: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = crate::grid::checked_pow(alphabet, len);
    (0..total).map(move |mut i| {
        let mut digits = vec![0; len];
        for slot in digits.iter_mut().rev() {
            *slot = i % alphabet;
            i /= alphabet;
        }
        digits
    })
}

/// Canonical words of length at most `max_len`, empty word first, sorted by
/// length then lexicographically. There are exactly `alphabet^max_len`.
pub fn enumerate_words(alphabet: usize, max_len: usize) -> Vec<Word> {
    let mut words = vec![Word::empty()];
    for len in 1..=max_len {
        words.extend(all_words_of_length(alphabet, len).filter(|d| d[len - 1] != 0).map(Word));
    }
    words
}
