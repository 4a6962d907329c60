use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} has {size} binary variables, above the limit of {limit}")]
    LimitExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("invalid problem: {}", .0.join("; "))]
    InvalidProblem(Vec<String>),

    #[error("problem has no admissible schedule")]
    NoAdmissibleSchedule,

    #[error("model has no quadratic terms left to correlate")]
    NoQuadraticTerms,

    #[error("qubit index {index} out of range for {num_vars} variables")]
    IndexOutOfRange { index: usize, num_vars: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("measurement counts are empty")]
    EmptyCounts,

    #[error("optimal bitstring {0} is not in the admissible set")]
    OptimalNotAdmissible(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Size/oracle limit violations map to a dedicated CLI exit code.
    pub fn is_limit(&self) -> bool {
        matches!(self, Error::LimitExceeded { .. })
    }
}
