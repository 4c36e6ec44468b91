use thiserror::Error;

/// Errors produced by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// A series or iterative method did not reach the requested accuracy.
    #[error("{op} did not converge: {detail}")]
    NonConvergence { op: &'static str, detail: String },

    /// Quadrature failed to certify the requested tolerance.
    #[error("quadrature did not converge: best estimate {best}, gap {gap}")]
    Quadrature { best: f64, gap: f64 },

    /// A tensor-product integral was requested in more dimensions than supported.
    #[error("unsupported dimension {0} (at most 3)")]
    UnsupportedDimension(usize),

    /// The random recurrence produced a polynomial whose roots could not be isolated.
    #[error("sampling failed: {0}")]
    Sampling(String),

    /// Determinant evaluation hit a singular or unrecoverably scaled matrix.
    #[error("determinant failure: {0}")]
    Determinant(String),

    /// Monte Carlo request with too few samples for meaningful error bars.
    #[error("at least {min} samples required, got {got}")]
    TooFewSamples { min: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        op,
        detail: detail.into(),
    }
}
