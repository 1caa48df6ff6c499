use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid modulus {0}: must be at least 2")]
    InvalidModulus(BigInt),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("level {level}: {reason}")]
    LevelConstruction { level: usize, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported epsilon form: {0}")]
    UnsupportedEpsilon(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("invalid target function: {0}")]
    InvalidTarget(String),

    #[error("A0 is empty after filtering the transformed set by n0 = {n0}")]
    EmptyA0 { n0: u64 },

    #[error("counting mode error: {0}")]
    Mode(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("input set is not B_{h}[{g}]: r({witness}) = {count}")]
    NotBhg {
        h: usize,
        g: u64,
        witness: BigInt,
        count: u64,
    },

    #[error("diagnostic error: {0}")]
    Diagnostic(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
