use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Error type shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {requested} exceeds the hard cap of {cap}")]
    QubitCapExceeded { requested: usize, cap: usize },

    #[error("qubit index {index} out of range for a {n_qubits}-qubit state")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("missing column {0:?} in input CSV")]
    MissingColumn(String),

    #[error("row {row}: {message}")]
    BadRow { row: usize, message: String },

    #[error("requested {requested} rows of class {class} but only {available} are available")]
    InsufficientClass {
        class: u8,
        requested: usize,
        available: usize,
    },

    #[error("feature {0:?} is constant and cannot be standardized")]
    ConstantFeature(String),

    #[error("requested {requested} principal components but the achievable rank is {achievable}")]
    RankDeficient { requested: usize, achievable: usize },

    #[error("dataset must be standard-scaled before PCA (no scaling step in provenance)")]
    NotScaled,

    #[error("training data contains a single class")]
    SingleClass,

    #[error("solver did not converge within {0} iterations")]
    NoConvergence(usize),

    #[error("stratification failed: {0}")]
    Stratification(String),

    #[error("unknown hardware profile {name:?}; available profiles: {available}")]
    UnknownProfile { name: String, available: String },

    #[error("bad file format: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
