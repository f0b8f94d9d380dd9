use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("image must be at least 3x3, got {width}x{height}")]
    TooSmall { width: usize, height: usize },
    #[error("expected {expected} pixels, got {actual}")]
    PixelCount { expected: usize, actual: usize },
    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },
    #[error("point ({x}, {y}) is outside the image")]
    OutOfBounds { x: i32, y: i32 },
    #[error("inner point ({x}, {y}) lies on an edge pixel")]
    InnerOnEdge { x: i32, y: i32 },
    #[error("difference image has no nonzero pixel")]
    ZeroMovement,
    #[error("reference area must be positive")]
    NonPositiveReference,
    #[error("timestamp {current} ms does not follow {previous} ms")]
    NonMonotonicTimestamp { previous: u64, current: u64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("object path leaves the frame at frame {frame}")]
    PathOutOfBounds { frame: usize },
}
