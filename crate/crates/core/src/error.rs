use num_complex::Complex64;
use thiserror::Error;

use crate::coefficients::Classification;
use crate::polynomials::InnerProducts;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-positive off-diagonal coefficient a_{index} = {value}")]
    NonPositiveCoefficient { index: usize, value: f64 },

    #[error("index {index} is beyond the tabulated range (max index {max})")]
    IndexBeyondTable { index: usize, max: usize },

    #[error("recurrence overflowed at index {index}")]
    Overflow { index: usize },

    #[error("model is not a limit-circle candidate (classified as {0:?})")]
    NotLimitCircle(Classification),

    #[error("truncation not converged by N = {n_max}: tail estimate {tail:.3e}")]
    TruncationNotConverged {
        n_max: usize,
        tail: f64,
        partial: Box<InnerProducts>,
    },

    #[error("spectral point: denominator {denominator} vanishes")]
    SpectralPoint { denominator: Complex64 },

    #[error("Jost solutions did not reach the requested quality: deviation {deviation:.3e} at N_start = {n_start}")]
    JostQuality { deviation: f64, n_start: usize },

    #[error("Wronskian band spread {spread:.3e} exceeds tolerance")]
    BandSpread { spread: f64 },

    #[error("moment s_{order} depends on the truncation (deviation {deviation:.3e}); increase N")]
    Contamination { order: usize, deviation: f64 },

    #[error("vector of length {len} exceeds the table length {max}")]
    VectorTooLong { len: usize, max: usize },

    #[error("{path}: line {line}, field `{field}`: {message}")]
    Parse {
        path: String,
        line: usize,
        field: String,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
