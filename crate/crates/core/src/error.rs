use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the clustering pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("{path}: missing required column `{column}`")]
    Schema { path: String, column: String },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error("bad file format: {0}")]
    Format(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("inconsistent labeling: {0}")]
    InconsistentLabels(String),

    #[error(
        "affinity propagation needs {needed_bytes} bytes for its message matrices, \
         over the {budget_bytes}-byte budget; rerun with --sample or raise --memory-budget-mb"
    )]
    MemoryBudget { needed_bytes: u64, budget_bytes: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True when the error is caused by user input (bad files, schemas,
    /// parameters) rather than an internal failure. The CLI maps usage
    /// errors to exit code 2 and everything else to 1.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::EmptyInput(_)
                | Error::Parameter(_)
                | Error::Schema { .. }
                | Error::Parse { .. }
                | Error::Format(_)
                | Error::MemoryBudget { .. }
                | Error::Io(_)
        )
    }
}
