use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("bad magic: expected MMK1, found {found:?}")]
    BadMagic { found: String },

    #[error("header is not a JSON object: {0}")]
    HeaderJson(String),

    #[error("header key '{key}': {reason}")]
    HeaderKey { key: String, reason: String },

    #[error("payload size mismatch: expected {expected} bytes, found {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("csv: {0}")]
    Csv(String),

    #[error("duplicate cell (n={n}, f={f}, m={m}) at line {line}")]
    DuplicateCell {
        n: usize,
        f: usize,
        m: usize,
        line: u64,
    },

    #[error("missing cell (n={n}, f={f}, m={m})")]
    MissingCell { n: usize, f: usize, m: usize },

    #[error("cell (n={n}, f={f}, m={m}) outside tensor of shape {dims} at line {line}")]
    CellOutOfRange {
        n: usize,
        f: usize,
        m: usize,
        dims: String,
        line: u64,
    },

    #[error("sample (n={n}, f={f}, m={m}) does not fit in float32")]
    NotRepresentable { n: usize, f: usize, m: usize },

    #[error("band file: {0}")]
    Band(String),

    #[error(transparent)]
    Core(#[from] sgmimo_core::Error),
}

impl IoError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn key(key: &str, reason: impl Into<String>) -> Self {
        IoError::HeaderKey {
            key: key.to_string(),
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag, used in CLI error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            IoError::Io { .. } => "io",
            IoError::BadMagic { .. } | IoError::HeaderJson(_) | IoError::HeaderKey { .. } => {
                "parse"
            }
            IoError::SizeMismatch { .. } => "size-mismatch",
            IoError::Csv(_) => "csv",
            IoError::DuplicateCell { .. } => "duplicate-cell",
            IoError::MissingCell { .. } => "missing-cell",
            IoError::CellOutOfRange { .. } => "cell-out-of-range",
            IoError::NotRepresentable { .. } => "not-representable",
            IoError::Band(_) => "band",
            IoError::Core(e) => e.kind(),
        }
    }
}

pub type Result<T, E = IoError> = std::result::Result<T, E>;
