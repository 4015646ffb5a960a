use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric at ({row}, {col}): {upper} vs {lower}")]
    NotSymmetric {
        row: usize,
        col: usize,
        upper: f64,
        lower: f64,
    },

    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "eigen-iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    EigenNotConverged { iterations: usize, residual: f64 },

    #[error("eigenvectors are not orthonormal (max deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("u carries no energy in cov (u^T C u = {energy:e})")]
    DegenerateDirection { energy: f64 },

    #[error("proximal gradient did not converge after {iterations} iterations (last step {last_step:e}, objective {objective:e})")]
    ProxGradNotConverged {
        iterations: usize,
        last_step: f64,
        objective: f64,
    },

    #[error("matrix is not positive definite: {context}")]
    NotPositiveDefinite { context: String },

    #[error("column {column} subproblem did not converge after {cycles} cycles (last change {last_change:e})")]
    SubproblemNotConverged {
        column: usize,
        cycles: usize,
        last_change: f64,
    },

    #[error("no distinct eigen-gap: all eigenvalues lie within {tol:e} of each other")]
    NoDistinctGap { tol: f64 },

    #[error("degree {degree} of node {node} leaves no real square root")]
    NonPositiveDegree { node: usize, degree: f64 },

    #[error("training diverged at epoch {epoch}")]
    Diverged { epoch: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Numerical failures map to CLI exit code 2, everything else to 1.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::EigenNotConverged { .. }
                | Error::NotOrthonormal { .. }
                | Error::DegenerateDirection { .. }
                | Error::ProxGradNotConverged { .. }
                | Error::NotPositiveDefinite { .. }
                | Error::SubproblemNotConverged { .. }
                | Error::NoDistinctGap { .. }
                | Error::NonPositiveDegree { .. }
                | Error::Diverged { .. }
        )
    }

    pub fn exit_code(&self) -> i32 {
        if self.is_numerical() {
            2
        } else {
            1
        }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
