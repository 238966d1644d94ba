use num_bigint::BigUint;
use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported field order {0}: only prime orders and powers of two up to 65536 are supported")]
    UnsupportedField(u64),

    #[error("value {value} is not an element of GF({order})")]
    ElementOutOfRange { value: u64, order: u64 },

    #[error("inversion of zero in GF({0})")]
    ZeroInversion(u64),

    #[error("network parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("invalid network: {0}")]
    Validation(String),

    #[error("rate {rate} exceeds the min-cut capacity {capacity} of sink {sink}")]
    Capacity {
        sink: String,
        capacity: usize,
        rate: usize,
    },

    #[error("enumeration requires {required} assignments, which exceeds the cap of {cap}")]
    EnumerationCap { required: BigUint, cap: u64 },

    #[error("path collection is inconsistent with the network: {0}")]
    PathInconsistency(String),

    #[error("unknown sink {0}")]
    UnknownSink(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("generator gave up after {attempts} attempts: {hint}")]
    GeneratorExhausted { attempts: usize, hint: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
