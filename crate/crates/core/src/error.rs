use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("frequency {0} is not canonical: its first nonzero entry must be positive")]
    NonCanonical(String),

    #[error("design density must be positive, got {value} at row {row}")]
    NonPositiveDensity { row: usize, value: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error(
        "saddle-point solve for gamma = {gamma} stopped at residual {residual}, above tolerance {tol}"
    )]
    NoConvergence { gamma: f64, tol: f64, residual: f64 },

    #[error("no admissible gamma_star >= 1/d* for L = {l}, d* = {d_star}")]
    NoAdmissibleGamma { l: f64, d_star: usize },

    #[error("frequency set is empty")]
    EmptyFrequencySet,

    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
