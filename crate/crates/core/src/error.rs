use thiserror::Error;

/// Errors surfaced by the engine. Record-level problems during ingestion are
/// not errors; they are reported as rejected rows so a bad line never aborts
/// a whole run.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty evaluation sequence: no trust without evidence")]
    EmptySequence,

    #[error("evaluation at interval {label} lies after the horizon {horizon}")]
    AfterHorizon { label: u32, horizon: u32 },

    #[error("timestamp {0} precedes the interval epoch")]
    BeforeEpoch(String),

    #[error("unknown worker `{0}`")]
    UnknownWorker(String),

    #[error("unknown evaluator `{0}`")]
    UnknownEvaluator(String),

    #[error("graph edges are not annotated yet; run the annotation pass first")]
    NotAnnotated,

    #[error("input contains no usable records")]
    NoRecords,

    #[error("cohort is empty; nothing to measure")]
    EmptyCohort,

    #[error("line {line}: {msg}")]
    Malformed { line: u64, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
