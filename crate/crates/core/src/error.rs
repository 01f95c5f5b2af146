use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("vector norm is zero (or below 1e-12); cannot normalize")]
    ZeroNorm,

    #[error("vector contains a non-finite component")]
    NonFinite,

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("index is empty")]
    EmptyIndex,

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("duplicate document id `{0}`")]
    DuplicateDoc(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("{source_name}, line {line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("unsupported index format version {found} (this build reads up to {supported})")]
    FormatVersion { found: u32, supported: u32 },

    #[error("checksum mismatch for {}", .file.display())]
    Checksum { file: PathBuf },

    #[error("corrupt index data: {0}")]
    Corrupt(String),

    #[error("index at {} is locked by another writer", .0.display())]
    Locked(PathBuf),

    #[error("an index already exists at {}", .0.display())]
    IndexExists(PathBuf),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(source_name: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            line,
            message: message.into(),
        }
    }
}
