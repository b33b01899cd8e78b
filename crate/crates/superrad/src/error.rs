//! Error types shared by all modules.

/// Errors produced by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An argument is valid mathematically but outside the supported range.
    #[error("range error: {0}")]
    Range(String),

    /// A series did not converge within the term cap. Carries the partial
    /// sum and the bound on the remaining terms at the point of failure.
    #[error("series failed to converge after {terms} terms (partial sum {partial:e}, remainder bound {bound:e})")]
    Convergence {
        partial: f64,
        bound: f64,
        terms: usize,
    },

    /// Adaptive quadrature could not meet the requested tolerance.
    #[error("quadrature tolerance not met: estimated error {error:e} > {tol:e}")]
    Quadrature { error: f64, tol: f64 },

    /// A sampling grid is too coarse for the requested operation.
    #[error("grid too coarse: {0}")]
    Resolution(String),
}

pub type Result<T> = std::result::Result<T, Error>;
