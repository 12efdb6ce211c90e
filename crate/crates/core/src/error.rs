use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("eigenvector for eigenvalue {eigenvalue:.12e} did not converge after {restarts} restarts")]
    InverseIteration { eigenvalue: f64, restarts: usize },

    #[error("quadrature did not converge: estimate {estimate:.6e}, error bound {error:.3e} (requested {requested:.1e})")]
    Quadrature {
        estimate: f64,
        error: f64,
        requested: f64,
    },

    #[error("table check failed: {0}")]
    Table(String),

    #[error("well labelling failed: {0}")]
    Labelling(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    /// True for failures of an iterative numerical method (as opposed to bad input).
    pub fn is_convergence(&self) -> bool {
        matches!(
            self,
            Error::InverseIteration { .. } | Error::Quadrature { .. } | Error::Table(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Validation(msg()))
    }
}
