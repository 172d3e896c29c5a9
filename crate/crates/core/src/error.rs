use thiserror::Error;

/// Faults raised when a simulator breaks its own machine model. These are
/// implementation bugs, never language rejections.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Fault {
    #[error("{discipline} head cannot move {direction}")]
    Discipline {
        discipline: &'static str,
        direction: &'static str,
    },
    #[error("sweeping head reversed direction away from an end-marker at cell {position}")]
    SweepReversal { position: String },
    #[error("input head left the marked tape (cell {position})")]
    OutOfBounds { position: String },
    #[error("counter decremented below zero")]
    CounterUnderflow,
    #[error("restart requested on a non-restarting head")]
    Restart,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} lies outside the oracle prefix of length {len}")]
    OutOfPrefix { index: u64, len: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("simulator fault: {0}")]
    Fault(#[from] Fault),
    #[error("resource cap exceeded: {0}")]
    CapExceeded(String),
    #[error("exact mode not available: {0}")]
    ExactTooLarge(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
