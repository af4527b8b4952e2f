//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid obstacle: {0}")]
    InvalidObstacle(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid grid spec: {0}")]
    InvalidGrid(String),
    #[error("scenario unusable for training: only {0} non-outage grid points (need >= 100)")]
    InsufficientCoverage(usize),
}

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("sin(azimuth) out of range: {0}")]
    AngleOutOfRange(f64),
    #[error("array size must be a power of two, got {0}")]
    NotPowerOfTwo(usize),
    #[error("codebook level {level} out of range for {elements} elements")]
    LevelOutOfRange { elements: usize, level: u32 },
    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("link budget invalid: {0}")]
    InvalidLinkBudget(String),
    #[error("link blocked between {from} and {to}")]
    BlockedLink { from: String, to: String },
}

#[derive(Debug, Error)]
pub enum LearningError {
    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: String,
    },
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("non-finite loss at epoch {epoch} (loss = {loss})")]
    NonFiniteLoss { epoch: usize, loss: f64 },
    #[error("model file parse error: {0}")]
    Parse(String),
    #[error("model validation failed on field `{field}`: {reason}")]
    Validation { field: String, reason: String },
    #[error("model i/o error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum MobilityError {
    #[error("insufficient history: have {have} entries, need {need}")]
    InsufficientHistory { have: usize, need: usize },
    #[error("invalid mobility model: {0}")]
    InvalidModel(String),
    #[error("trace entries must have strictly increasing slot indices")]
    NonMonotonicTrace,
}

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("invalid fanout {fanout} for codebook of {elements} elements")]
    InvalidFanout { fanout: usize, elements: usize },
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Learning(#[from] LearningError),
    #[error(transparent)]
    Mobility(#[from] MobilityError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("no trained model available for the ml protocol")]
    MissingModel,
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
