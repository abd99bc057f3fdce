//! Error type shared by every module in the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite input `{0}`")]
    NonFinite(&'static str),

    #[error("conditioning event has probability zero: {0}")]
    ZeroProbability(&'static str),

    #[error("failed to bracket a root after {expansions} expansions ({context})")]
    Bracketing { context: &'static str, expansions: usize },

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    #[error("quadrature error estimate {estimate:e} exceeds target {target:e}")]
    QuadratureAccuracy { estimate: f64, target: f64 },

    #[error("Monte Carlo estimate under-sampled: {accepted} accepted draws (need at least {required})")]
    UnderSampled { accepted: u64, required: u64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
