use thiserror::Error;

/// Errors produced by the movement-primitive, simulation and harness layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("ill-conditioned normal equations ({0}); use a ridge factor > 0")]
    IllConditioned(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("no force dimension deviates from its expectation")]
    EmptySelection,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("target grid ends at {target}s but the record only covers {available}s")]
    Extrapolation { target: f64, available: f64 },

    #[error("demonstration {index} failed to insert: {reason}")]
    Generation { index: usize, reason: String },

    #[error("environment fault at t={t:.4}s: {reason}")]
    EnvFault { t: f64, reason: String },

    #[error("unsupported schema version {found}; supported: {supported:?}")]
    Version { found: u32, supported: Vec<u32> },

    #[error("parse error in {context}: {source}")]
    Parse {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
