//! Crate-wide error type.

use thiserror::Error;

/// All failure modes surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("insufficient audio: {0}")]
    InsufficientAudio(String),

    #[error("sample rate {0} Hz too low (need at least {1} Hz)")]
    SampleRateTooLow(u32, u32),

    #[error("malformed container: {0}")]
    MalformedWav(String),

    #[error("unsupported encoding: {0}")]
    UnsupportedEncoding(String),

    #[error("unsupported channel count: {0}")]
    UnsupportedChannels(u16),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty score list: {0}")]
    EmptyScores(String),

    #[error("unknown task acronym: {0}")]
    UnknownTask(String),

    #[error("task {0} has no synthesizable audio model")]
    UnsupportedTaskSynthesis(String),

    #[error("no tasks satisfy the challenge policy")]
    EmptyEligibleSet,

    #[error("verifier stack not trained: {0}")]
    UntrainedStack(String),

    #[error("insufficient voiced audio: {0}")]
    InsufficientVoicedAudio(String),

    #[error("calibration corpus too small: {got} honest responses (need {need})")]
    CalibrationCorpusTooSmall { got: usize, need: usize },

    #[error("inconsistent corpus spec: {0}")]
    InconsistentCorpusSpec(String),

    #[error("caller channel lost: {0}")]
    ChannelLost(String),

    #[error("transcript replay mismatch: {0}")]
    ReplayMismatch(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Coarse failure category, used for CLI exit codes.
    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            InsufficientAudio(_)
            | SampleRateTooLow(..)
            | MalformedWav(_)
            | UnsupportedEncoding(_)
            | UnsupportedChannels(_) => ErrorCategory::Audio,
            DimensionMismatch { .. } | EmptyScores(_) | UntrainedStack(_) => ErrorCategory::Model,
            UnknownTask(_) | UnsupportedTaskSynthesis(_) | EmptyEligibleSet => {
                ErrorCategory::Catalog
            }
            InvalidArgument(_) | InconsistentCorpusSpec(_) | CalibrationCorpusTooSmall { .. } => {
                ErrorCategory::Config
            }
            InsufficientVoicedAudio(_) | ChannelLost(_) | ReplayMismatch(_) => {
                ErrorCategory::Session
            }
            Io(_) | Json(_) | Csv(_) => ErrorCategory::Io,
        }
    }
}

/// Exit-code categories for the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Audio,
    Model,
    Catalog,
    Session,
    Io,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Config => 2,
            ErrorCategory::Audio => 3,
            ErrorCategory::Model => 4,
            ErrorCategory::Catalog => 5,
            ErrorCategory::Session => 6,
            ErrorCategory::Io => 7,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ErrorCategory::Config => "config",
            ErrorCategory::Audio => "audio",
            ErrorCategory::Model => "model",
            ErrorCategory::Catalog => "catalog",
            ErrorCategory::Session => "session",
            ErrorCategory::Io => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
