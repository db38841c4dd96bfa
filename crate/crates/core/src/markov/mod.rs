//! Finite Markov sources and the analytic side of the reduction ratio.

mod annotate;
mod chain;
mod factors;
mod iid;
mod sampling;
mod stationary;
mod terminal;

use thiserror::Error;

pub use annotate::{
    annotate, gamma1, m_down, m_up, nu_bar, nu_plus, AnnotatedChain, AnnotatedState, Dir, Direction,
};
pub use chain::{ChainSpec, MarkovChain};
pub use factors::{
    check_stationary_identities, factor_chain, gamma2_truncated, sample_factors, FactorChainView,
    FactorEntry, Gamma2Estimate, IdentityCheck, IdentityReport, MAX_FACTORS,
};
pub use iid::gamma1_iid;
pub use sampling::{sample_word, trial_rng};
pub use stationary::{reverse_chain, stationary, StationaryDistribution};
pub use terminal::{decompose, terminal_components, TerminalDecomposition};

pub(crate) use iid::validate_law;
pub(crate) use sampling::ChainSampler;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MarkovError {
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("invalid law: {0}")]
    InvalidLaw(String),
    #[error("the chain has {0} terminal components; exactly one is required")]
    MultipleTerminalComponents(usize),
    #[error("the terminal component is a single absorbing state")]
    SingletonTerminal,
    #[error("truncation tail {tail:.3e} exceeds the limit {limit}")]
    TailTooLarge { tail: f64, limit: f64 },
    #[error("the law puts all its mass on one letter")]
    DegenerateLaw,
    #[error("factor enumeration exceeds {limit} words; lower max_len")]
    EnumerationTooLarge { limit: usize },
}
