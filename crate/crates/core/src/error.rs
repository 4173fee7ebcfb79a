use thiserror::Error;

/// Errors raised by the evaluation and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the region where the object is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A denominator vanished at the requested parameters.
    #[error("pole: {0}")]
    Pole(String),

    /// An infinite product or series did not reach its stopping bound.
    #[error("truncation failed: {what} did not converge within {max_terms} terms")]
    Truncation { what: String, max_terms: usize },

    /// Adaptive quadrature ran out of panels.
    #[error("quadrature did not converge: error estimate {estimate:e} after {panels} panels")]
    Quadrature { estimate: f64, panels: usize },

    /// A conjugate-pair evaluation produced a non-negligible imaginary part.
    #[error("imaginary residue {residue:e} exceeds tolerance for a real-valued result")]
    ImaginaryResidue { residue: f64 },

    /// Bad configuration of a check or of the suite.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
