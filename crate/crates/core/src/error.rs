use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid dimension header: {0}")]
    InvalidDim(String),

    #[error("unknown register label {0:?}")]
    UnknownRegister(String),

    #[error("not Hermitian (max |M - M^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("not positive semi-definite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("trace {0} outside (0, 1]")]
    InvalidTrace(f64),

    #[error("state is not normalized (trace or norm {0})")]
    NotNormalized(f64),

    #[error("probabilities invalid: {0}")]
    InvalidProbabilities(String),

    #[error("matrix is not a projector (deviation {0:e})")]
    NotProjector(f64),

    #[error("vector is not orthogonal to |0> (overlap {0:e})")]
    NotOrthogonal(f64),

    #[error("parameter {name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("size cap exceeded: {0}")]
    CapExceeded(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("concentration checks failed after {attempts} batches (last norms {norms:?}, target {eps})")]
    RetriesExhausted {
        attempts: usize,
        norms: [Option<f64>; 3],
        eps: f64,
    },

    #[error("decode error at bit {offset}: {reason}")]
    Decode { offset: usize, reason: String },

    #[error("admissibility gate failed: {0}")]
    Gate(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_open_unit(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            range: "(0, 1)",
        })
    }
}
