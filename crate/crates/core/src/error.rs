use thiserror::Error;

/// Errors produced by the corridor pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what}: expected length {expected}, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("line {line}: {message}")]
    Schema { line: u64, message: String },

    #[error("{} trip(s) outside the operating window: {}", .0.len(), .0.join(", "))]
    OutsideWindow(Vec<String>),

    #[error("brute-force search space of {size} schedules exceeds the bound of {bound}")]
    SizeBound { size: u128, bound: u128 },

    #[error("no feasible schedule: {0}")]
    Infeasible(String),

    #[error("provenance does not match demand: {0}")]
    Provenance(String),

    #[error("missing outcome for trip {0}")]
    MissingOutcome(String),

    #[error("sweep cell L={lane_count}, p_c={capture_rate} failed: {source}")]
    SweepCell {
        lane_count: u32,
        capture_rate: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
