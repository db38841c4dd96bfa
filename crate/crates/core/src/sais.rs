//! Recursive SA-IS with per-level instrumentation.
//!
//! Each level classifies positions as L/S, sorts the LMS substrings by one
//! round of induced sorting, names them, and recurses on the reduced word
//! only when a name repeats. A second round of induced sorting then derives
//! the full suffix array from the order of the LMS suffixes.

use serde::{Deserialize, Serialize};

use crate::words::{non_decreasing_flags, FactorOrder, SuffixArrayResult, Word};

const EMPTY: usize = usize::MAX;

/// Lengths and alphabet sizes of `w, is(w), is²(w), ...` as seen by one run
/// of the engine. `depth` counts the reductions performed, i.e. the number
/// of levels minus one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub level_lengths: Vec<usize>,
    pub level_alphabet_sizes: Vec<usize>,
    pub depth: usize,
    pub ratios: Vec<f64>,
    /// Suffix-array slots visited by the induced-sorting scans, all levels.
    pub scan_operations: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaisOutput {
    pub suffix_array: SuffixArrayResult,
    pub trace: ReductionTrace,
}

#[derive(Default)]
struct Recorder {
    lengths: Vec<usize>,
    alphabets: Vec<usize>,
    scans: u64,
    words: Option<Vec<Vec<usize>>>,
}

pub fn sais(w: &Word) -> SaisOutput {
    let n = w.len();
    let letters = w.letters();
    let (text, k) = if w.alphabet_size() as u128 > n as u128 + 1 {
        let dense = w.dense_ranked();
        let k = dense.alphabet_size() as usize;
        (
            dense
                .into_letters()
                .into_iter()
                .map(|l| l as usize)
                .collect::<Vec<_>>(),
            k,
        )
    } else {
        (
            letters.iter().map(|&l| l as usize).collect(),
            w.alphabet_size() as usize,
        )
    };

    let mut rec = Recorder::default();
    rec.lengths.push(n);
    rec.alphabets.push(w.distinct_letters());
    let order = suffix_array_rec(&text, k, &mut rec);

    let depth = rec.lengths.len() - 1;
    let ratios = rec
        .lengths
        .iter()
        .map(|&l| if n == 0 { 0.0 } else { l as f64 / n as f64 })
        .collect();
    SaisOutput {
        suffix_array: SuffixArrayResult { order },
        trace: ReductionTrace {
            level_lengths: rec.lengths,
            level_alphabet_sizes: rec.alphabets,
            depth,
            ratios,
            scan_operations: rec.scans,
        },
    }
}

fn has_repeat(s: &[usize], k: usize) -> bool {
    let mut seen = vec![false; k];
    s.iter().any(|&c| std::mem::replace(&mut seen[c], true))
}

/// Suffix array of `s` over letters `< k`. The caller has already recorded
/// this level in `rec`.
fn suffix_array_rec(s: &[usize], k: usize, rec: &mut Recorder) -> Vec<usize> {
    let n = s.len();
    if n == 0 {
        return Vec::new();
    }
    if !has_repeat(s, k) {
        let mut sa = vec![EMPTY; k];
        for (i, &c) in s.iter().enumerate() {
            sa[c] = i;
        }
        sa.retain(|&i| i != EMPTY);
        return sa;
    }

    let stype = non_decreasing_flags(s);
    let is_lms = |i: usize| i > 0 && stype[i] && !stype[i - 1];
    let heads = bucket_heads(s, k);

    let lms: Vec<usize> = (1..n).filter(|&i| is_lms(i)).collect();
    let mut sa = vec![EMPTY; n];

    // Round one: sort the LMS substrings.
    {
        let mut tails = bucket_tails(&heads);
        for &p in lms.iter().rev() {
            let c = s[p];
            tails[c] -= 1;
            sa[tails[c]] = p;
        }
    }
    induce(s, &stype, &heads, &mut sa, rec);

    // Name LMS substrings in sorted order; text-order names give is(s).
    let mut name_of = vec![EMPTY; n];
    let mut next_lms = vec![n; n];
    for pair in lms.windows(2) {
        next_lms[pair[0]] = pair[1];
    }
    let mut names = 0usize;
    let mut prev: Option<usize> = None;
    for &p in sa.iter().filter(|&&p| is_lms(p)) {
        let same = prev.is_some_and(|q| lms_substrings_equal(s, q, p, &next_lms));
        if !same {
            names += 1;
        }
        name_of[p] = names - 1;
        prev = Some(p);
    }
    let reduced: Vec<usize> = lms.iter().map(|&p| name_of[p]).collect();

    rec.lengths.push(reduced.len());
    rec.alphabets.push(names);
    if let Some(words) = rec.words.as_mut() {
        words.push(reduced.clone());
    }
    let reduced_sa = if names < reduced.len() {
        suffix_array_rec(&reduced, names, rec)
    } else {
        let mut direct = vec![0; reduced.len()];
        for (i, &c) in reduced.iter().enumerate() {
            direct[c] = i;
        }
        direct
    };

    // Round two: LMS suffixes in their true order, then induce everything.
    sa.fill(EMPTY);
    {
        let mut tails = bucket_tails(&heads);
        for &r in reduced_sa.iter().rev() {
            let p = lms[r];
            let c = s[p];
            tails[c] -= 1;
            sa[tails[c]] = p;
        }
    }
    induce(s, &stype, &heads, &mut sa, rec);
    sa
}

/// The LMS substring at `p` spans `s[p ..= next]`; the last one runs to the
/// end of the word and closes with the (unique) sentinel.
fn lms_substrings_equal(s: &[usize], p: usize, q: usize, next_lms: &[usize]) -> bool {
    let n = s.len();
    let (ep, eq) = (next_lms[p], next_lms[q]);
    if ep == n || eq == n {
        return false;
    }
    ep - p == eq - q && s[p..=ep] == s[q..=eq]
}

fn bucket_heads(s: &[usize], k: usize) -> Vec<usize> {
    let mut heads = vec![0usize; k + 1];
    for &c in s {
        heads[c + 1] += 1;
    }
    for c in 0..k {
        heads[c + 1] += heads[c];
    }
    heads
}

fn bucket_tails(heads: &[usize]) -> Vec<usize> {
    heads[1..].to_vec()
}

fn induce(s: &[usize], stype: &[bool], heads: &[usize], sa: &mut [usize], rec: &mut Recorder) {
    let n = s.len();
    let mut fronts = heads[..heads.len() - 1].to_vec();
    // The sentinel suffix precedes everything and induces position n-1,
    // which is always L-type.
    let c = s[n - 1];
    sa[fronts[c]] = n - 1;
    fronts[c] += 1;
    for i in 0..n {
        let j = sa[i];
        if j != EMPTY && j > 0 && !stype[j - 1] {
            let c = s[j - 1];
            sa[fronts[c]] = j - 1;
            fronts[c] += 1;
        }
    }
    let mut tails = bucket_tails(heads);
    for i in (0..n).rev() {
        let j = sa[i];
        if j != EMPTY && j > 0 && stype[j - 1] {
            let c = s[j - 1];
            tails[c] -= 1;
            sa[tails[c]] = j - 1;
        }
    }
    rec.scans += 2 * n as u64;
}

/// `[w, is(w), is²(w), ...]` with at most `max_k` reductions, stopping early
/// once a level has at most one letter or no repeated letter.
pub fn reduction_levels(w: &Word, max_k: usize) -> Vec<Word> {
    reduction_levels_with(w, max_k, FactorOrder::Lexicographic)
}

pub fn reduction_levels_with(w: &Word, max_k: usize, order: FactorOrder) -> Vec<Word> {
    let mut levels = vec![w.clone()];
    while levels.len() <= max_k {
        let last = levels.last().unwrap();
        if last.len() <= 1 || !last.has_repeated_letter() {
            break;
        }
        let next = crate::words::is_reduce_with(last, order);
        levels.push(next);
    }
    levels
}
