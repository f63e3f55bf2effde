use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("side length {0} is not a power of two >= 2")]
    NotPowerOfTwo(u64),

    #[error("target {target} lies outside the region [0,{max}]^{d}")]
    TargetOutside { target: String, max: u64, d: usize },

    #[error("label map is not injective: two terms collide on {label}")]
    NonInjective { label: String },

    #[error("decrement of zero register (width {width})")]
    Underflow { width: u32 },

    #[error("increment overflows register of width {width}")]
    Overflow { width: u32 },

    #[error("micro-program did not complete within {limit} steps")]
    Guard { limit: u64 },

    #[error("step count {n} outside the path-sum guard 1..={max}")]
    PathGuard { n: u32, max: u32 },

    #[error("element count {0} is not a power of two >= 2")]
    ElementCount(u64),

    #[error("recording mode mismatch: operation requires {required}")]
    RecordingMismatch { required: &'static str },

    #[error("state budget exceeded: need ~{needed} bytes, limit {limit} bytes")]
    Budget { needed: u64, limit: u64 },

    #[error("scaling fit needs at least 3 rows, got {0}")]
    TooFewRows(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
