use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid sparsity k = {k} for dimension p = {p}")]
    InvalidSparsity { k: usize, p: usize },

    #[error("degenerate matrix: column {column} has zero norm")]
    DegenerateMatrix { column: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix columns are not unit-norm; coherence is only defined for unit columns")]
    NonUnitColumns,

    #[error("support enumeration needs {required} evaluations, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("report is missing required constants: {}", missing.join(", "))]
    IncompleteReport { missing: Vec<String> },

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("theorem condition not satisfied: {0}")]
    ConditionNotSatisfied(String),

    #[error("unknown identifier `{0}`")]
    UnknownId(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("empty results: {0}")]
    EmptyResults(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
