use std::io;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: malformed header at byte {offset}: {reason}")]
    MalformedHeader {
        path: PathBuf,
        offset: u64,
        reason: &'static str,
    },
    #[error("{path}: unsupported maxval {maxval} (only 255 is supported)")]
    UnsupportedMaxval { path: PathBuf, maxval: u32 },
    #[error("{path}: frame is {actual:?}, expected {expected:?}")]
    DimensionMismatch {
        path: PathBuf,
        expected: (usize, usize),
        actual: (usize, usize),
    },
    #[error("{path}: truncated frame at byte {offset}")]
    TruncatedFrame { path: PathBuf, offset: u64 },
    #[error("{path}: no frame files found")]
    EmptyDirectory { path: PathBuf },
    #[error("{origin}:{line}: {message}")]
    Parse {
        origin: String,
        line: usize,
        message: String,
    },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error(transparent)]
    Core(#[from] sltk_core::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) trait IoContext<T> {
    fn at(self, path: impl Into<PathBuf>) -> Result<T>;
}

impl<T> IoContext<T> for io::Result<T> {
    fn at(self, path: impl Into<PathBuf>) -> Result<T> {
        self.map_err(|source| Error::Io {
            path: path.into(),
            source,
        })
    }
}
