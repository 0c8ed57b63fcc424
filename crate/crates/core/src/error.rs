use thiserror::Error;

/// Errors produced by the simulation core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("Faddeeva reflection term exp(-z^2) overflows at z = {re} + {im}i")]
    Overflow { re: f64, im: f64 },

    #[error("{what} did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    NonConvergence {
        what: &'static str,
        estimate: f64,
        error_bound: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
