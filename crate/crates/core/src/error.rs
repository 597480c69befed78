use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument {value} outside the domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("assignment table is not strictly increasing")]
    NotStrictlyIncreasing,

    #[error("index {index} out of range 0..{len}")]
    Index { index: usize, len: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no seed up to {seed_cap} places the bucket")]
    SeedExhausted { seed_cap: u64 },

    #[error("construction failed after {attempts} global seeds; the input most likely has duplicate keys")]
    DuplicateKeys { attempts: u32 },

    #[error("malformed serialized structure: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
