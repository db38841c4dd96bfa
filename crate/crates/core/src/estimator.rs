//! Monte Carlo side: trial means of `|is^k(w)|/|w|`, recursion depth
//! statistics and the uniform-real coupling.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::markov::{trial_rng, validate_law, ChainSampler, Direction, MarkovChain, MarkovError};
use crate::sais::sais;
use crate::words::{is_reduce, locally_minimal_indices, Letter, Word};

pub const MIN_GAMMA_WORD_LENGTH: usize = 64;
pub const MIN_DEPTH_WORD_LENGTH: usize = 16;
/// Two-sided 99% normal quantile.
const Z_99: f64 = 2.5758293035489;
const NORMAL_CI_MIN_TRIALS: usize = 30;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Markov(#[from] MarkovError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaEstimate {
    pub k: usize,
    pub trials: usize,
    pub word_length: usize,
    pub mean: f64,
    pub std_error: f64,
    /// Normal 99% interval from 30 trials on, the raw range below that.
    pub interval: (f64, f64),
    pub per_trial: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthReport {
    pub word_length: usize,
    pub trials: usize,
    /// `histogram[d]` counts trials of depth `d`.
    pub histogram: Vec<usize>,
    pub max_depth: usize,
    pub ell: f64,
    pub bound: f64,
    pub violations: usize,
    /// Words not sampled from a chain; the bound is reported, not checked.
    pub exempt: bool,
    pub per_trial: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingReport {
    pub word_length: usize,
    pub trials: usize,
    pub violations: usize,
    pub mean_real_ratio: f64,
    pub mean_discrete_ratio: f64,
}

/// Summary of a series of observations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Moments {
    pub mean: f64,
    pub std_error: f64,
}

/// Mean and standard error, summed in index order.
pub(crate) fn moments(xs: &[f64]) -> Moments {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return Moments {
            mean: 0.0,
            std_error: 0.0,
        };
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return Moments {
            mean,
            std_error: 0.0,
        };
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Moments {
        mean,
        std_error: (var / n).sqrt(),
    }
}

pub fn depth_bound(word_length: usize, ell: f64) -> f64 {
    2.0 * (word_length as f64).log2().log2() + ell
}

fn sample_trials<T, F>(
    chain: &MarkovChain,
    direction: Direction,
    n: usize,
    trials: usize,
    seed: u64,
    f: F,
) -> Vec<T>
where
    T: Send,
    F: Fn(&Word) -> T + Sync,
{
    let sampler = ChainSampler::new(chain);
    (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            f(&sampler.word(direction, n, &mut rng))
        })
        .collect()
}

/// `|is^k(w)|`, reducing past the point where the engine would stop recursing.
pub fn level_length(w: &Word, k: usize) -> usize {
    let mut current = w.clone();
    for _ in 0..k {
        if current.is_empty() {
            break;
        }
        current = is_reduce(&current);
    }
    current.len()
}

/// Mean of `|is^k(w)|/|w|` over `trials` words of length `word_length`.
pub fn estimate_gamma(
    chain: &MarkovChain,
    direction: Direction,
    k: usize,
    word_length: usize,
    trials: usize,
    seed: u64,
) -> Result<GammaEstimate, EstimateError> {
    if k == 0 {
        return Err(EstimateError::InvalidParameter(
            "level k must be at least 1".into(),
        ));
    }
    if word_length < MIN_GAMMA_WORD_LENGTH {
        return Err(EstimateError::InvalidParameter(format!(
            "word length must be at least {MIN_GAMMA_WORD_LENGTH}"
        )));
    }
    if trials == 0 {
        return Err(EstimateError::InvalidParameter(
            "trials must be positive".into(),
        ));
    }
    let per_trial = sample_trials(chain, direction, word_length, trials, seed, |w| {
        level_length(w, k) as f64 / word_length as f64
    });
    let Moments { mean, std_error } = moments(&per_trial);
    let interval = if trials >= NORMAL_CI_MIN_TRIALS {
        (mean - Z_99 * std_error, mean + Z_99 * std_error)
    } else {
        let lo = per_trial.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = per_trial.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    Ok(GammaEstimate {
        k,
        trials,
        word_length,
        mean,
        std_error,
        interval,
        per_trial,
    })
}

fn depth_report(word_length: usize, ell: f64, depths: Vec<usize>, exempt: bool) -> DepthReport {
    let bound = depth_bound(word_length, ell);
    let max_depth = depths.iter().copied().max().unwrap_or(0);
    let mut histogram = vec![0; max_depth + 1];
    for &d in &depths {
        histogram[d] += 1;
    }
    let violations = if exempt {
        0
    } else {
        depths.iter().filter(|&&d| d as f64 > bound).count()
    };
    DepthReport {
        word_length,
        trials: depths.len(),
        histogram,
        max_depth,
        ell,
        bound,
        violations,
        exempt,
        per_trial: depths,
    }
}

/// Recursion depth of the suffix-array engine on sampled words, against
/// `2·log₂(log₂ n) + ell`.
pub fn depth_stats(
    chain: &MarkovChain,
    direction: Direction,
    word_length: usize,
    trials: usize,
    ell: f64,
    seed: u64,
) -> Result<DepthReport, EstimateError> {
    if word_length < MIN_DEPTH_WORD_LENGTH {
        return Err(EstimateError::InvalidParameter(format!(
            "word length must be at least {MIN_DEPTH_WORD_LENGTH}"
        )));
    }
    let depths = sample_trials(chain, direction, word_length, trials, seed, |w| {
        sais(w).trace.depth
    });
    Ok(depth_report(word_length, ell, depths, false))
}

/// Depth of a single constructed word. Such words are outside the sampling
/// hypothesis, so the report is marked exempt and counts no violations.
pub fn depth_of_word(w: &Word, ell: f64) -> DepthReport {
    depth_report(w.len(), ell, vec![sais(w).trace.depth], true)
}

/// Ranks of `values` as a dense word, ties broken by position.
fn rank_word(values: &[f64]) -> Word {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut letters = vec![0; values.len()];
    for (rank, i) in order.into_iter().enumerate() {
        letters[i] = rank as Letter;
    }
    Word::from_letters(letters)
}

/// Draws words of i.i.d. uniform reals `u` and compares `|is(u)|` with
/// `|is(f(u))|`, where `f` buckets `[0, 1)` by the cumulative law.
pub fn coupling_trial(
    law: &[f64],
    word_length: usize,
    trials: usize,
    seed: u64,
) -> Result<CouplingReport, EstimateError> {
    validate_law(law)?;
    let mut cumulative = Vec::with_capacity(law.len());
    let mut acc = 0.0;
    for p in law {
        acc += p;
        cumulative.push(acc);
    }
    let last_positive = law.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let bucket = |u: f64| cumulative.partition_point(|&c| c <= u).min(last_positive) as Letter;

    let counts: Vec<(usize, usize)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let u: Vec<f64> = (0..word_length).map(|_| rng.gen::<f64>()).collect();
            let discrete = Word::new(u.iter().map(|&x| bucket(x)).collect(), law.len() as u64)
                .expect("buckets are letters of the law");
            (
                locally_minimal_indices(&rank_word(&u)).len(),
                locally_minimal_indices(&discrete).len(),
            )
        })
        .collect();

    let n = word_length.max(1) as f64;
    let real: Vec<f64> = counts.iter().map(|&(r, _)| r as f64 / n).collect();
    let disc: Vec<f64> = counts.iter().map(|&(_, d)| d as f64 / n).collect();
    Ok(CouplingReport {
        word_length,
        trials,
        violations: counts.iter().filter(|(r, d)| r < d).count(),
        mean_real_ratio: moments(&real).mean,
        mean_discrete_ratio: moments(&disc).mean,
    })
}

/// Density of locally minimal indices in `w` with a batch-means standard
/// error over `batches` contiguous blocks.
pub fn local_minimum_density(w: &Word, batches: usize) -> (f64, f64) {
    let n = w.len();
    let batches = batches.clamp(1, n.max(1));
    let mut counts = vec![0usize; batches];
    for i in locally_minimal_indices(w) {
        counts[i * batches / n] += 1;
    }
    let sizes: Vec<f64> = (0..batches)
        .map(|b| ((b + 1) * n / batches - b * n / batches) as f64)
        .collect();
    let ratios: Vec<f64> = counts
        .iter()
        .zip(&sizes)
        .map(|(&c, &s)| c as f64 / s)
        .collect();
    let density = counts.iter().sum::<usize>() as f64 / n.max(1) as f64;
    (density, moments(&ratios).std_error)
}
