use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the codecs, image I/O and metrics.
#[derive(Debug, Error)]
pub enum StegoError {
    #[error("bit sequence of length {0} is not a whole number of bytes")]
    NonOctetLength(usize),

    #[error("payload of {0} bytes does not fit a 32-bit length header")]
    PayloadTooLarge(usize),

    #[error("need 32 header bits, only {available} available")]
    TruncatedHeader { available: usize },

    #[error("header announces {needed} body bits, only {available} available")]
    TruncatedBody { needed: u64, available: usize },

    #[error("payload of {requested} bits exceeds capacity of {capacity} bits")]
    PayloadExceedsCapacity { requested: usize, capacity: usize },

    #[error("requested {requested} bits but the image only holds {capacity}")]
    RequestExceedsCapacity { requested: usize, capacity: usize },

    #[error("method {0} requires a key")]
    MissingKey(&'static str),

    #[error("method {0} does not take a key")]
    UnexpectedKey(&'static str),

    #[error("invalid key: {0}")]
    InvalidKey(String),

    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),

    #[error("invalid image dimensions {0}x{1}")]
    InvalidDimensions(u32, u32),

    #[error("images are identical, PSNR is infinite")]
    IdenticalImages,

    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("unknown method {0:?} (expected lsb, karim or cyclic)")]
    UnknownMethod(String),

    #[error("invalid experiment: {0}")]
    InvalidExperiment(String),

    #[error("malformed table: {0}")]
    MalformedTable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, StegoError>;
