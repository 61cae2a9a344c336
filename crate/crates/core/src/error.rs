use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("operator {what} is not Hermitian (deviation {deviation:e})")]
    NotHermitian { what: String, deviation: f64 },

    #[error("{kind} {index} is not positive semidefinite (eigenvalue {eigenvalue})")]
    NotPositive {
        kind: &'static str,
        index: usize,
        eigenvalue: f64,
    },

    #[error("effect {index} is not bounded by the identity (eigenvalue of 1 - E: {eigenvalue:e})")]
    EffectExceedsUnit { index: usize, eigenvalue: f64 },

    #[error("state {index} has unit-effect value {value}, outside [0, 1]")]
    StateNormalization { index: usize, value: f64 },

    #[error("cone has no generators")]
    EmptyGenerators,

    #[error("cone generators span {rank} of {dim} dimensions")]
    GeneratorsNotSpanning { rank: usize, dim: usize },

    #[error("the {0} span is zero-dimensional")]
    ZeroDimensionalSpan(&'static str),

    #[error("maximally mixed state lies outside the span of the states")]
    MixedStateOutsideSpan,

    #[error("noise level {0} is outside [0, 1]")]
    NoiseLevel(f64),

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("no simplex embedding exists even with full noise (r = 1)")]
    InfeasibleAtFullNoise,

    #[error("certificate does not reproduce the target rule (residual {residual:e})")]
    UnverifiedCertificate { residual: f64 },

    #[error("unit effect maps to a negative weight {value:e} on ontic state {index}")]
    UnitOutsideEffectCone { index: usize, value: f64 },

    #[error("simplex normalisation failed: {0}")]
    SimplexNormalization(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Errors caused by the caller's data rather than by this library.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Internal(_) | Error::UnverifiedCertificate { .. })
    }
}
