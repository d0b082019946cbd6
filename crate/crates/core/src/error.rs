use std::io;

/// Every failure the library can surface.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("unsupported colorspace `{0}`")]
    UnsupportedColorspace(String),
    #[error("truncated frame {index}: expected {expected} bytes, got {got}")]
    TruncatedFrame {
        index: u64,
        expected: usize,
        got: usize,
    },
    #[error("malformed frame marker: {0}")]
    MalformedFrameMarker(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("sink unavailable: {0}")]
    SinkUnavailable(String),
    #[error("invalid command template: {0}")]
    InvalidTemplate(String),
    #[error("failed to spawn `{program}`: {source}")]
    SpawnFailure {
        program: String,
        #[source]
        source: io::Error,
    },
    #[error("`{program}` exited with {status}: {stderr}")]
    NonZeroExit {
        program: String,
        status: String,
        stderr: String,
    },
    #[error("broken pipe to `{0}`")]
    BrokenPipe(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("malformed sidecar row {line}: {detail}")]
    MalformedRow { line: u64, detail: String },
    #[error("non-monotonic sidecar index at row {line}: {detail}")]
    NonMonotonicIndex { line: u64, detail: String },
    #[error("zero input: reduction undefined for an empty input")]
    ZeroInput,
    #[error("invalid counts: {0}")]
    InvalidCounts(String),
    #[error("too few frames: need at least 2, got {0}")]
    TooFewFrames(u64),
    #[error("sidecar mismatch: {0}")]
    SidecarMismatch(String),
    #[error("missing reference: motion frame {0} precedes any full frame")]
    MissingReference(u64),
    #[error("{stage} stage failed: {source}")]
    StageFailure {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Short kebab-case category used in single-line CLI diagnostics.
    pub fn category(&self) -> &'static str {
        match self {
            Error::MalformedHeader(_) => "malformed-header",
            Error::UnsupportedColorspace(_) => "unsupported-colorspace",
            Error::TruncatedFrame { .. } => "truncated-frame",
            Error::MalformedFrameMarker(_) => "malformed-frame-marker",
            Error::DimensionMismatch(_) => "dimension-mismatch",
            Error::SinkUnavailable(_) => "sink-unavailable",
            Error::InvalidTemplate(_) => "invalid-template",
            Error::SpawnFailure { .. } => "spawn-failure",
            Error::NonZeroExit { .. } => "non-zero-exit",
            Error::BrokenPipe(_) => "broken-pipe",
            Error::InvalidConfig(_) => "invalid-config",
            Error::MalformedRow { .. } => "malformed-row",
            Error::NonMonotonicIndex { .. } => "non-monotonic-index",
            Error::ZeroInput => "zero-input",
            Error::InvalidCounts(_) => "invalid-counts",
            Error::TooFewFrames(_) => "too-few-frames",
            Error::SidecarMismatch(_) => "sidecar-mismatch",
            Error::MissingReference(_) => "missing-reference",
            Error::StageFailure { .. } => "stage-failure",
            Error::Io(_) => "io",
        }
    }

    /// The innermost error, looking through stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::StageFailure { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
