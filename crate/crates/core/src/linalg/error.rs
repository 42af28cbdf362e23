use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("{routine}: no convergence after {iterations} iterations")]
    NoConvergence {
        routine: &'static str,
        iterations: usize,
    },

    #[error("matrix is singular to working precision (pivot {pivot} at column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error("matrix is not symmetric (relative asymmetry {asymmetry:.3e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not Hurwitz stable")]
    NotStable,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite entries in {0}")]
    NonFinite(&'static str),

    #[error("Newton-Kleinman iteration did not converge in {iterations} steps (last residual {last:.3e})", last = residuals.last().copied().unwrap_or(f64::NAN))]
    RiccatiNoConvergence {
        iterations: usize,
        residuals: Vec<f64>,
    },

    #[error("no stabilizing initial feedback found for the Riccati iteration")]
    NoStabilizingGuess,
}

pub type Result<T> = std::result::Result<T, LinalgError>;
