//! Words over ordered integer alphabets, their unimodal (LMS) factorization
//! and the one-step reduction `w -> is(w)`.
//!
//! The sentinel `$` is never stored. Wherever a factor reaches the end of the
//! word it carries a flag instead, and comparisons treat that flag as a
//! letter smaller than every real letter.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A letter id. Natural integer order is the alphabet order.
pub type Letter = u64;

/// Words at least this long are rejected at construction.
pub const MAX_WORD_LEN: usize = 1 << 40;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error(
        "letter {letter} at position {position} is not below the alphabet size {alphabet_size}"
    )]
    LetterOutOfRange {
        position: usize,
        letter: Letter,
        alphabet_size: u64,
    },
    #[error("a non-empty word needs an alphabet of size at least 1")]
    EmptyAlphabet,
    #[error("word length {0} exceeds the supported maximum of 2^40")]
    TooLong(usize),
}

/// A finite word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    letters: Vec<Letter>,
    alphabet_size: u64,
}

impl Word {
    pub fn new(letters: Vec<Letter>, alphabet_size: u64) -> Result<Self, WordError> {
        if letters.len() >= MAX_WORD_LEN {
            return Err(WordError::TooLong(letters.len()));
        }
        if !letters.is_empty() && alphabet_size == 0 {
            return Err(WordError::EmptyAlphabet);
        }
        if let Some((position, &letter)) = letters
            .iter()
            .enumerate()
            .find(|(_, &l)| l >= alphabet_size)
        {
            return Err(WordError::LetterOutOfRange {
                position,
                letter,
                alphabet_size,
            });
        }
        Ok(Self {
            letters,
            alphabet_size,
        })
    }

    /// Builds a word whose alphabet is `{0, ..., max letter}`.
    pub fn from_letters(letters: Vec<Letter>) -> Self {
        let alphabet_size = letters.iter().max().map_or(0, |&m| m + 1);
        assert!(letters.len() < MAX_WORD_LEN, "word too long");
        Self {
            letters,
            alphabet_size,
        }
    }

    /// Rank-maps the characters of `text`: the smallest character becomes 0.
    pub fn from_text(text: &str) -> Self {
        let alphabet: BTreeSet<char> = text.chars().collect();
        let rank = |c: char| alphabet.range(..c).count() as Letter;
        let letters: Vec<Letter> = text.chars().map(rank).collect();
        Self {
            letters,
            alphabet_size: alphabet.len() as u64,
        }
    }

    pub fn empty() -> Self {
        Self {
            letters: Vec::new(),
            alphabet_size: 0,
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn alphabet_size(&self) -> u64 {
        self.alphabet_size
    }

    pub fn distinct_letters(&self) -> usize {
        let mut sorted = self.letters.clone();
        sorted.sort_unstable();
        sorted.dedup();
        sorted.len()
    }

    /// `true` iff some letter occurs at least twice.
    pub fn has_repeated_letter(&self) -> bool {
        self.distinct_letters() < self.letters.len()
    }

    /// Order-preserving relabelling onto `{0, ..., d-1}` where `d` is the
    /// number of distinct letters.
    pub fn dense_ranked(&self) -> Word {
        let mut sorted = self.letters.clone();
        sorted.sort_unstable();
        sorted.dedup();
        let letters = self
            .letters
            .iter()
            .map(|l| sorted.binary_search(l).unwrap() as Letter)
            .collect();
        Word {
            letters,
            alphabet_size: sorted.len() as u64,
        }
    }
}

impl From<Vec<Letter>> for Word {
    fn from(letters: Vec<Letter>) -> Self {
        Word::from_letters(letters)
    }
}

/// A unimodal factor. When `sentinel` is set the factor is `letters · $`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub letters: Vec<Letter>,
    pub sentinel: bool,
}

impl Factor {
    /// Number of symbols, the sentinel included.
    pub fn len(&self) -> usize {
        self.letters.len() + usize::from(self.sentinel)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl std::fmt::Display for Factor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        if self.sentinel {
            parts.push("$".to_string());
        }
        f.write_str(&parts.join(" "))
    }
}

/// The expanded reduction `eis(w)`: locally minimal indices and the factors
/// they delimit. Factor `j` spans `w[minima[j] ..= minima[j+1]]`; the last
/// one runs to the end of the word and closes with the sentinel.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub minima: Vec<usize>,
    pub factors: Vec<Factor>,
}

impl Factorization {
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuffixArrayResult {
    pub order: Vec<usize>,
}

/// How distinct factors are ranked when a factorization is turned into a
/// word of integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum FactorOrder {
    /// Plain lexicographic order over `A ∪ {$}`; a proper prefix is smaller.
    #[default]
    Lexicographic,
    /// The order induced sorting produces: identical to `Lexicographic`
    /// except that a proper prefix is *larger*. This is the order under which
    /// the reduced word's suffix array lists the locally minimal suffixes of
    /// the original word in sorted order.
    Induced,
}

/// `flags[i]` is true iff `i` is w-non-decreasing: some `j > i` has
/// `w[i] = ... = w[j-1] < w[j]`. The last position never is.
pub(crate) fn non_decreasing_flags<T: Ord>(w: &[T]) -> Vec<bool> {
    let n = w.len();
    let mut flags = vec![false; n];
    for i in (0..n.saturating_sub(1)).rev() {
        flags[i] = match w[i].cmp(&w[i + 1]) {
            Ordering::Less => true,
            Ordering::Equal => flags[i + 1],
            Ordering::Greater => false,
        };
    }
    flags
}

pub(crate) fn minima_of<T: Ord>(w: &[T]) -> Vec<usize> {
    let flags = non_decreasing_flags(w);
    (1..w.len())
        .filter(|&i| flags[i] && w[i - 1] > w[i])
        .collect()
}

/// Indices `i` with `w[i-1] > w[i]` that are w-non-decreasing, ascending.
pub fn locally_minimal_indices(w: &Word) -> Vec<usize> {
    minima_of(w.letters())
}

pub fn eis(w: &Word) -> Factorization {
    let minima = locally_minimal_indices(w);
    let letters = w.letters();
    let factors = (0..minima.len())
        .map(|j| match minima.get(j + 1) {
            Some(&next) => Factor {
                letters: letters[minima[j]..=next].to_vec(),
                sentinel: false,
            },
            None => Factor {
                letters: letters[minima[j]..].to_vec(),
                sentinel: true,
            },
        })
        .collect();
    Factorization { minima, factors }
}

/// Compares `a · [$]` with `b · [$]` symbol by symbol.
pub(crate) fn compare_factors<T: Ord>(
    a: &[T],
    a_sentinel: bool,
    b: &[T],
    b_sentinel: bool,
    order: FactorOrder,
) -> Ordering {
    let common = a.len().min(b.len());
    match a[..common].cmp(&b[..common]) {
        Ordering::Equal => {}
        other => return other,
    }
    // Symbols at position `common`: a letter, the sentinel, or end of factor.
    #[derive(PartialEq, Eq, PartialOrd, Ord)]
    enum Next {
        Sentinel,
        Letter,
    }
    let next = |len: usize, sentinel: bool| {
        if len > common {
            Some(Next::Letter)
        } else if sentinel {
            Some(Next::Sentinel)
        } else {
            None
        }
    };
    match (next(a.len(), a_sentinel), next(b.len(), b_sentinel)) {
        (None, None) => Ordering::Equal,
        (Some(x), Some(y)) => x.cmp(&y),
        (None, Some(_)) => match order {
            FactorOrder::Lexicographic => Ordering::Less,
            FactorOrder::Induced => Ordering::Greater,
        },
        (Some(_), None) => match order {
            FactorOrder::Lexicographic => Ordering::Greater,
            FactorOrder::Induced => Ordering::Less,
        },
    }
}

/// Dense ranks of the factors delimited by `minima` (text order), together
/// with the number of distinct factors.
pub(crate) fn rank_factors<T: Ord>(
    w: &[T],
    minima: &[usize],
    order: FactorOrder,
) -> (Vec<u64>, u64) {
    let k = minima.len();
    let span = |j: usize| -> (&[T], bool) {
        match minima.get(j + 1) {
            Some(&next) => (&w[minima[j]..=next], false),
            None => (&w[minima[j]..], true),
        }
    };
    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_unstable_by(|&x, &y| {
        let (a, sa) = span(x);
        let (b, sb) = span(y);
        compare_factors(a, sa, b, sb, order)
    });
    let mut ranks = vec![0u64; k];
    let mut rank = 0u64;
    for (pos, &j) in idx.iter().enumerate() {
        if pos > 0 {
            let (a, sa) = span(idx[pos - 1]);
            let (b, sb) = span(j);
            if compare_factors(a, sa, b, sb, order) != Ordering::Equal {
                rank += 1;
            }
        }
        ranks[j] = rank;
    }
    let distinct = if k == 0 { 0 } else { rank + 1 };
    (ranks, distinct)
}

/// `is(w)` with factors ranked lexicographically (proper prefix smaller).
pub fn is_reduce(w: &Word) -> Word {
    is_reduce_with(w, FactorOrder::Lexicographic)
}

pub fn is_reduce_with(w: &Word, order: FactorOrder) -> Word {
    let minima = locally_minimal_indices(w);
    let (letters, distinct) = rank_factors(w.letters(), &minima, order);
    Word {
        letters,
        alphabet_size: distinct,
    }
}

/// Comparison-sorts all suffixes. Oracle use only.
pub fn naive_suffix_array(w: &Word) -> SuffixArrayResult {
    let letters = w.letters();
    let mut order: Vec<usize> = (0..letters.len()).collect();
    order.sort_by(|&a, &b| letters[a..].cmp(&letters[b..]));
    SuffixArrayResult { order }
}

/// Largest size of a w-alternating sequence (descent, ascent, descent, ...),
/// computed greedily in one left-to-right pass.
pub fn max_alternating_size(w: &Word) -> usize {
    let letters = w.letters();
    let Some(&first) = letters.first() else {
        return 0;
    };
    let mut size = 0;
    let mut seeking_descent = true;
    // Running maximum while seeking a descent, running minimum otherwise.
    let mut extreme = first;
    for &c in &letters[1..] {
        if seeking_descent {
            if c < extreme {
                seeking_descent = false;
                extreme = c;
            } else {
                extreme = c;
            }
        } else if c > extreme {
            size += 1;
            seeking_descent = true;
            extreme = c;
        } else {
            extreme = c;
        }
    }
    size
}

/// `w[j] == w[j+k]` whenever both positions lie in the middle part
/// `b ..= |w|-b-1`.
pub fn is_periodic_except_borders(w: &Word, k: usize, b: usize) -> bool {
    assert!(k >= 1, "period must be at least 1");
    let letters = w.letters();
    let Some(end) = letters.len().checked_sub(b) else {
        return true;
    };
    // positions j, j+k with b <= j and j+k < end
    (b..end.saturating_sub(k)).all(|j| letters[j] == letters[j + k])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(letters: &[Letter]) -> Word {
        Word::from_letters(letters.to_vec())
    }

    fn banana() -> Word {
        word(&[1, 0, 13, 0, 13, 0])
    }

    #[test]
    fn banana_minima_and_factors() {
        assert_eq!(locally_minimal_indices(&banana()), vec![1, 3]);
        let f = eis(&banana());
        assert_eq!(
            f.factors[0],
            Factor {
                letters: vec![0, 13, 0],
                sentinel: false
            }
        );
        assert_eq!(
            f.factors[1],
            Factor {
                letters: vec![0, 13, 0],
                sentinel: true
            }
        );
        assert_eq!(is_reduce(&banana()).letters(), &[0, 1]);
    }

    #[test]
    fn combinatorial_example() {
        let w = Word::from_text("COMBINATORIAL");
        assert_eq!(locally_minimal_indices(&w), vec![3, 6, 8, 11]);
        let f = eis(&w);
        let rendered: Vec<String> = f
            .factors
            .iter()
            .map(|factor| {
                let mut s: String = factor
                    .letters
                    .iter()
                    .map(|&l| "ABCILMNORT".as_bytes()[l as usize] as char)
                    .collect();
                if factor.sentinel {
                    s.push('$');
                }
                s
            })
            .collect();
        assert_eq!(rendered, ["BINA", "ATO", "ORIA", "AL$"]);
        assert_eq!(is_reduce(&w).letters(), &[2, 1, 3, 0]);
        assert_eq!(is_reduce(&w).alphabet_size(), 4);
    }

    #[test]
    fn monotone_words_have_no_minima() {
        assert!(locally_minimal_indices(&word(&[0, 1, 2, 3])).is_empty());
        assert!(eis(&word(&[3, 2, 1, 0])).is_empty());
        assert!(is_reduce(&word(&[3, 2, 1, 0])).is_empty());
        assert!(eis(&Word::empty()).is_empty());
    }

    #[test]
    fn naive_suffix_arrays() {
        assert_eq!(naive_suffix_array(&banana()).order, vec![5, 3, 1, 0, 4, 2]);
        assert_eq!(naive_suffix_array(&word(&[7])).order, vec![0]);
        assert_eq!(naive_suffix_array(&word(&[0, 1, 2])).order, vec![0, 1, 2]);
        assert!(naive_suffix_array(&Word::empty()).order.is_empty());
    }

    #[test]
    fn alternating_sizes() {
        assert_eq!(max_alternating_size(&banana()), 2);
        assert_eq!(max_alternating_size(&word(&[0, 1, 2, 3])), 0);
        assert_eq!(max_alternating_size(&word(&[3, 3, 2, 0])), 0);
        assert_eq!(max_alternating_size(&Word::from_text("COMBINATORIAL")), 4);
    }

    #[test]
    fn periodicity_examples() {
        assert!(is_periodic_except_borders(&word(&[0, 1, 0, 1, 0, 1]), 2, 0));
        assert!(is_periodic_except_borders(&word(&[9, 1, 0, 1, 0, 9]), 2, 1));
        assert!(!is_periodic_except_borders(
            &word(&[0, 1, 2, 0, 1, 2]),
            2,
            0
        ));
        assert!(is_periodic_except_borders(&word(&[0, 1, 2, 0, 1, 2]), 3, 0));
        assert!(is_periodic_except_borders(&word(&[0, 1]), 5, 4));
    }

    #[test]
    fn prefix_rule_distinguishes_orders() {
        // "ana" and "ana$": a proper prefix of the sentinel factor.
        assert_eq!(
            is_reduce_with(&banana(), FactorOrder::Lexicographic).letters(),
            &[0, 1]
        );
        assert_eq!(
            is_reduce_with(&banana(), FactorOrder::Induced).letters(),
            &[1, 0]
        );
        assert_eq!(
            compare_factors(
                &[0, 2, 1],
                false,
                &[0, 2, 1, 0],
                false,
                FactorOrder::Lexicographic
            ),
            Ordering::Less
        );
        assert_eq!(
            compare_factors(
                &[0, 2, 1],
                false,
                &[0, 2, 1, 0],
                false,
                FactorOrder::Induced
            ),
            Ordering::Greater
        );
        assert_eq!(
            compare_factors(&[0, 1], true, &[0, 1, 0], false, FactorOrder::Induced),
            Ordering::Less
        );
    }

    #[test]
    fn word_validation() {
        assert!(matches!(
            Word::new(vec![0, 3], 3),
            Err(WordError::LetterOutOfRange { position: 1, .. })
        ));
        assert_eq!(Word::new(vec![1], 0), Err(WordError::EmptyAlphabet));
        assert!(Word::new(vec![], 0).is_ok());
        let w = word(&[5, 9, 5]).dense_ranked();
        assert_eq!(w.letters(), &[0, 1, 0]);
        assert_eq!(w.alphabet_size(), 2);
    }
}
