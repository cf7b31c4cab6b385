use thiserror::Error;

/// Errors raised by the estimator library and the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, got {got}")]
    DimensionMismatch {
        op: &'static str,
        expected: String,
        got: String,
    },

    #[error("matrix is not Hermitian positive definite (pivot {pivot})")]
    NotHpd { pivot: usize },

    #[error("2x2 matrix is singular (|det| = {det:e})")]
    Singular { det: f64 },

    #[error("component {index} is degenerate: {reason}")]
    DegenerateComponent { index: usize, reason: String },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid model: {0}")]
    BadModel(String),

    #[error("invalid constellation: {0}")]
    BadConstellation(String),

    #[error("invalid specification: {0}")]
    BadSpec(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn dims(op: &'static str, expected: impl Into<String>, got: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            op,
            expected: expected.into(),
            got: got.into(),
        }
    }

    /// Stable kebab-case name of the variant, for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::NotHpd { .. } => "not-hpd",
            Error::Singular { .. } => "singular",
            Error::DegenerateComponent { .. } => "degenerate-component",
            Error::IndexOutOfRange { .. } => "index-out-of-range",
            Error::BadModel(_) => "bad-model",
            Error::BadConstellation(_) => "bad-constellation",
            Error::BadSpec(_) => "bad-spec",
            Error::Io { .. } => "io",
            Error::Json { .. } => "json",
        }
    }

    /// File the error refers to, if any.
    pub fn path(&self) -> Option<&str> {
        match self {
            Error::Io { path, .. } | Error::Json { path, .. } => Some(path),
            _ => None,
        }
    }

    /// True for failures caused by numerically degenerate input (singular or
    /// indefinite matrices, unobservable components) as opposed to malformed
    /// configuration.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotHpd { .. } | Error::Singular { .. } | Error::DegenerateComponent { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
