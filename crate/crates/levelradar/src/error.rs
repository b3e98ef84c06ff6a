//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong across the crate, from parameter validation
/// to frame-file decoding.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric or structural argument fails its domain check.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A frame (or background) does not match the expected sample layout.
    #[error("dimension mismatch: expected {expected} samples, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Every bin of a spectrum is masked, so no peak can be selected.
    #[error("every spectrum bin is masked")]
    AllBinsMasked,

    /// A tracker step left no bin reachable at finite cost.
    #[error("no finite-cost path to any bin at this step")]
    NoFinitePath,

    /// The exhaustive path search would enumerate too much work.
    #[error("exhaustive search too large: {work:.3e} exceeds limit {limit:.3e}")]
    SearchTooLarge { work: f64, limit: f64 },

    /// A config file line is not `key = value`.
    #[error("config line {line}: {message}")]
    ConfigSyntax { line: usize, message: String },

    /// A config value parsed but fails validation.
    #[error("config key `{key}`: {message}")]
    ConfigValue { key: String, message: String },

    /// A frame file does not start with the expected magic bytes.
    #[error("bad magic bytes: not a frame capture file")]
    BadMagic,

    /// A frame file uses a format version this build does not understand.
    #[error("unsupported frame file version {0}")]
    UnsupportedVersion(u32),

    /// A frame file's byte length disagrees with its header.
    #[error("frame file size mismatch: header implies {expected} bytes, found {got}")]
    Truncated { expected: u64, got: u64 },

    /// A requested slot index is not present in the file.
    #[error("slot {slot} out of range: file holds {count} frames")]
    SlotOutOfRange { slot: usize, count: usize },

    /// Background subtraction was requested but the file carries no background.
    #[error("frame file has no background capture; pass --no-background to process raw frames")]
    MissingBackground,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
