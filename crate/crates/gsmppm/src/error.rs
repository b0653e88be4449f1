//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the design, analysis, and simulation operations.
#[derive(Debug, Error)]
pub enum Error {
    /// A modulation pattern violates its structural constraints.
    #[error("invalid modulation pattern: {0}")]
    InvalidPattern(String),

    /// A constellation is structurally broken (see the validation report).
    #[error("invalid constellation: {0}")]
    InvalidConstellation(String),

    /// The dual-mode parameter selection found no feasible triple.
    #[error("no feasible (m_a, m_b, n_add) triple for pattern {0}")]
    AdmInfeasible(String),

    /// An exhaustive subset search would exceed its budget and the local
    /// search fallback is disabled.
    #[error("subset search space of {candidates} candidates exceeds budget {budget} and local search is disabled")]
    SubsetBudgetExceeded { candidates: u128, budget: u64 },

    /// Fading or power parameters are out of range.
    #[error("invalid channel parameters: {0}")]
    InvalidChannel(String),

    /// A base matrix (or its text form) is malformed.
    #[error("invalid base matrix: {0}")]
    InvalidBaseMatrix(String),

    /// A lifted parity-check matrix has linearly dependent rows, so no
    /// systematic encoder exists; re-lift with a different seed.
    #[error("parity-check matrix is rank deficient (rank {rank} of {rows} rows); re-lift with a different seed")]
    RankDeficient { rank: usize, rows: usize },

    /// A bisection bracket does not straddle the quantity being solved for.
    #[error("bracket [{lo}, {hi}] does not straddle the target: {detail}")]
    Bracket { lo: f64, hi: f64, detail: String },

    /// A base-matrix search produced no candidate satisfying the design
    /// constraints.
    #[error("base-matrix search yielded no feasible candidate")]
    SearchInfeasible,

    /// An experiment configuration is inconsistent.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True when the error reflects bad input rather than a runtime failure.
    /// Command-line tools map validation errors and runtime errors to
    /// different exit codes.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidPattern(_)
                | Error::InvalidConstellation(_)
                | Error::InvalidChannel(_)
                | Error::InvalidBaseMatrix(_)
                | Error::InvalidConfig(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
