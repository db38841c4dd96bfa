//! Suffix arrays by induced sorting, the reduction `w -> is(w)` it performs,
//! and tools to measure how fast that reduction shrinks words: exact
//! worst-case families, analytic ratios for Markov sources and Monte Carlo
//! estimators.

pub mod estimator;
pub mod io;
pub mod markov;
pub mod sais;
pub mod words;
pub mod worst_case;

pub use estimator::{
    coupling_trial, depth_bound, depth_of_word, depth_stats, estimate_gamma, level_length,
    local_minimum_density, CouplingReport, DepthReport, EstimateError, GammaEstimate,
};
pub use sais::{reduction_levels, reduction_levels_with, sais, ReductionTrace, SaisOutput};
pub use words::{
    eis, is_periodic_except_borders, is_reduce, is_reduce_with, locally_minimal_indices,
    max_alternating_size, naive_suffix_array, Factor, FactorOrder, Factorization, Letter,
    SuffixArrayResult, Word, WordError,
};
