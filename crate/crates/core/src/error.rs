use thiserror::Error;

/// Errors surfaced by the library. Every variant is a usage or input error;
/// the learners themselves never fail once their configuration is valid.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain bit-length d = {0} is out of range (need 9 <= d <= {max})", max = crate::ows::MAX_DOMAIN_BITS)]
    DomainBits(usize),

    #[error("expected a {expected}-bit string, got {actual} bits")]
    BitLength { expected: usize, actual: usize },

    #[error("index {index} is outside [0, 2^{k})")]
    IndexOutOfRange { index: u64, k: u32 },

    #[error("forward computation requires j > i (got j = {j}, i = {i})")]
    NotForward { j: u64, i: u64 },

    #[error("invalid hex: {0}")]
    Hex(String),

    #[error("epsilon must be positive and finite, got {0}")]
    Epsilon(f64),

    #[error("delta must lie in [0, 1), got {0}")]
    Delta(f64),

    #[error("{name} must lie in {range}, got {value}")]
    Parameter {
        name: &'static str,
        range: &'static str,
        value: f64,
    },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("dataset is not sorted or has a value outside [1, {bound}]")]
    UnsortedDataset { bound: u64 },

    #[error("rank window [{lo}, {hi}] is empty for n = {n}")]
    DegenerateWindow { lo: usize, hi: usize, n: usize },

    #[error("cannot compose an empty sequence of budgets")]
    EmptyComposition,

    #[error("domain size {domain} is smaller than the {distinct} distinct observed items")]
    DomainTooSmall { domain: String, distinct: usize },

    #[error("stream length {requested} exceeds the available {available} indices")]
    StreamLength { requested: u64, available: u64 },

    #[error("online protocol violation: {0}")]
    Protocol(&'static str),

    #[error("distribution has no support")]
    EmptyDistribution,

    #[error("enumeration budget exceeded: {0}")]
    Budget(String),

    #[error("malformed encoding: {0}")]
    Encoding(String),
}

pub type Result<T> = std::result::Result<T, Error>;
