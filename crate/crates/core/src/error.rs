//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by validation, domain checks, and resource guards.
#[derive(Debug, Error)]
pub enum Error {
    /// Two tables that must live on the same alphabet do not.
    #[error("alphabet size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),

    /// A probability entry is more negative than the rejection tolerance.
    #[error("negative probability {value:.3e} at flat index {index}")]
    NegativeEntry { index: usize, value: f64 },

    /// A distribution (or a conditional row) deviates from total mass 1
    /// by more than the rejection tolerance.
    #[error("probabilities sum to {sum} (deviation {deviation:.3e} exceeds 1e-9)")]
    NotNormalized { sum: f64, deviation: f64 },

    /// KL divergence is undefined: `p` puts mass on a symbol outside the
    /// support of `q`.
    #[error("support violation: q[{index}] = 0 but p[{index}] = {p_value:.3e} > 0")]
    SupportViolation { index: usize, p_value: f64 },

    /// An argument lies outside the mathematical domain of the operation.
    #[error("{0}")]
    Domain(String),

    /// A requested table would exceed the entry cap.
    #[error("table of {required} entries exceeds cap of {cap}")]
    TableTooLarge { required: usize, cap: usize },

    /// A condition that the algorithms guarantee internally failed anyway;
    /// indicates a bug, not bad input.
    #[error("internal error: {0}")]
    Internal(String),

    /// Reading or parsing an external file failed.
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
