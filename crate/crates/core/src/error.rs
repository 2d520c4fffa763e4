use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the simulator and budget engine.
///
/// Variants are grouped by cause so callers (the CLI in particular) can tell
/// a bad configuration apart from a failure inside a simulation run.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("payload sizing: {0}")]
    Sizing(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("sample-rate mismatch: {0} Hz vs {1} Hz")]
    SampleRateMismatch(f64, f64),

    #[error("frequency {freq_hz} Hz is outside the representable band (|f| < {nyquist_hz} Hz)")]
    Aliasing { freq_hz: f64, nyquist_hz: f64 },

    #[error("unsupported QAM order {0} (expected 4, 16 or 64)")]
    UnsupportedQam(u32),

    #[error("synchronization failed: {0}")]
    Synchronization(String),

    #[error("no optical tone found: {0}")]
    ToneNotFound(String),

    #[error("WDM plan: {0}")]
    Plan(String),

    #[error("insufficient carrier: {0}")]
    InsufficientCarrier(String),

    #[error("topology: {0}")]
    Topology(String),

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("config validation failed: {0}")]
    Validation(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for errors caused by the input configuration rather than by a run.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Parse(_) | Error::Validation(_) | Error::Plan(_) | Error::Topology(_) => true,
            Error::Stage { source, .. } => source.is_validation(),
            _ => false,
        }
    }

    pub(crate) fn at_stage(self, stage: &'static str) -> Error {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.at_stage(stage))
    }
}
