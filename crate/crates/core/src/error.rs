use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("too few points: need at least {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("all x values are equal; the regression is undefined")]
    DegenerateX,

    #[error("no pair of points with distinct x values")]
    NoValidPairs,

    #[error("empty input")]
    EmptyInput,

    #[error("invalid output range [{lower}, {upper}]")]
    InvalidRange { lower: f64, upper: f64 },

    #[error("invalid privacy budget: {0}")]
    InvalidBudget(String),

    #[error("privacy budget exceeded by `{mechanism}`: {detail}")]
    BudgetExceeded { mechanism: String, detail: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("every trial failed")]
    AllFailures,

    #[error("standard error is zero for dataset `{0}`")]
    ZeroStandardError(String),

    #[error("tract family is empty")]
    EmptyFamily,

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: u64,
        column: usize,
        message: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
