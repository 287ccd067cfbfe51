use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("collection is empty")]
    EmptyCollection,

    #[error("string {index} is empty")]
    EmptyString { index: usize },

    #[error("symbol {symbol:?} at string {index}, offset {offset} is not in the alphabet")]
    ForeignSymbol {
        index: usize,
        offset: usize,
        symbol: char,
    },

    #[error("collection too large: {0}")]
    CollectionTooLarge(String),

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("position {position} out of range for segment of length {len}")]
    PositionOutOfRange { position: usize, len: usize },

    #[error("lcp width of {width} byte(s) cannot represent values up to {max_len}")]
    WidthTooSmall { width: usize, max_len: usize },

    #[error("generation {iteration} not found in {}", dir.display())]
    MissingGeneration { iteration: usize, dir: PathBuf },

    #[error("inconsistent state: {0}")]
    InconsistentState(String),

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("verify refused: N = {n} exceeds cap {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
