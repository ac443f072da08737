//! Edit distances between token strings.

use crate::alphabet::{same_alphabet, TokenString};
use crate::error::{Error, Result};

/// Which edit operations a distance may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EditMetric {
    /// Insertions and deletions only.
    #[default]
    Indel,
    /// Insertions, deletions and substitutions, each of cost 1.
    Levenshtein,
}

impl EditMetric {
    pub fn distance<T: PartialEq>(self, a: &[T], b: &[T]) -> usize {
        match self {
            EditMetric::Indel => indel(a, b),
            EditMetric::Levenshtein => levenshtein(a, b),
        }
    }
}

/// Insertion/deletion distance between two token strings over the same alphabet.
pub fn indel_distance(a: &TokenString, b: &TokenString) -> Result<usize> {
    if !same_alphabet(a.alphabet(), b.alphabet()) {
        return Err(Error::AlphabetMismatch);
    }
    Ok(indel(a.ids(), b.ids()))
}

pub fn levenshtein_distance(a: &TokenString, b: &TokenString) -> Result<usize> {
    if !same_alphabet(a.alphabet(), b.alphabet()) {
        return Err(Error::AlphabetMismatch);
    }
    Ok(levenshtein(a.ids(), b.ids()))
}

/// `len(a) + len(b) - 2 * lcs(a, b)`.
pub fn indel<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    a.len() + b.len() - 2 * lcs_len(a, b)
}

pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    // common prefix/suffix never change the LCS beyond their own length
    let pre = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let (a, b) = (&a[pre..], &b[pre..]);
    let suf = a
        .iter()
        .rev()
        .zip(b.iter().rev())
        .take_while(|(x, y)| x == y)
        .count();
    let (a, b) = (&a[..a.len() - suf], &b[..b.len() - suf]);
    if a.is_empty() || b.is_empty() {
        return pre + suf;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    pre + suf + prev[b.len()]
}

pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}
