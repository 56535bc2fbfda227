//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation (bad parameter,
    /// point outside the parameter space, malformed grid, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation is not defined for this model / support class.
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// Adaptive quadrature exhausted its refinement budget without meeting
    /// the requested tolerance. Carries the best estimate and the residual
    /// disagreement so callers can decide whether to accept it anyway.
    #[error("quadrature tolerance not met: best estimate {best}, residual {residual}")]
    Tolerance { best: f64, residual: f64 },

    /// A posterior (or other) normalizer failed to stabilize under window
    /// doubling — the distribution is improper or numerically indistinguishable
    /// from improper.
    #[error("improper distribution: {0}")]
    Impropriety(String),

    /// Fisher-information style functionals are divergent or negative, so the
    /// asymptotic-normality route is unavailable for this model.
    #[error("nonregular model: {0}")]
    Nonregular(String),

    /// A divergence estimate exceeded its configured budget and is treated as
    /// infinite.
    #[error("divergence budget exceeded: running value {value} >= budget {budget} nats")]
    DivergenceBudget { value: f64, budget: f64 },

    /// Invalid run configuration (CLI layer).
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
