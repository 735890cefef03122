use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the numerical core and the artifact emitters.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// An iterative solver hit its iteration cap.
    #[error("{op} did not converge within {iterations} iterations (residual {residual:e})")]
    Convergence {
        op: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// Bracket expansion ran past the representable range.
    #[error("{op}: bracket expansion diverged past {limit:e}")]
    Divergence { op: &'static str, limit: f64 },

    /// Adaptive quadrature ran out of refinements before reaching the
    /// requested tolerance. `estimate` is the best value obtained.
    #[error("quadrature precision not reached: estimate {estimate:e}, error {error:e} > tol {abs_tol:e}")]
    Precision { estimate: f64, error: f64, abs_tol: f64 },

    /// Invalid parameter or configuration value.
    #[error("invalid {what}: {msg}")]
    Invalid { what: &'static str, msg: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Error {
    Error::Domain { op, msg: msg.into() }
}

pub(crate) fn invalid(what: &'static str, msg: impl Into<String>) -> Error {
    Error::Invalid { what, msg: msg.into() }
}
