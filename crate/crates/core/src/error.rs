use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid time scale: {0}")]
    InvalidScale(String),

    #[error("point {0} is not a member of the time scale")]
    NotInScale(f64),

    #[error("operation requires a discrete time scale")]
    ContinuousScale,

    #[error("empty range: a = {a} is not below b = {b}")]
    EmptyRange { a: f64, b: f64 },

    #[error("sampled function has no value at t = {0}")]
    MissingSample(f64),

    #[error("sampled function cannot be differentiated at the dense point {0}")]
    DensePointSampledFunc(f64),

    #[error("t = {0} is the left-scattered maximum; the delta derivative is undefined there")]
    NotInKappa(f64),

    #[error("point {t} lies outside the kernel support [{a}, {b})")]
    OutOfRange { t: f64, a: f64, b: f64 },

    #[error("invalid kernel specification: {0}")]
    InvalidSpec(String),

    #[error("invalid sampled function: {0}")]
    InvalidFunc(String),

    #[error("invalid bounds: {0}")]
    InvalidBounds(String),

    #[error("variance {0} is negative beyond rounding")]
    NegativeVariance(f64),

    #[error("time scale does not match the {0} closed form")]
    FamilyMismatch(&'static str),

    #[error("unsupported theorem for this search: {0}")]
    UnsupportedTheorem(String),

    #[error("internal identity mismatch: {0}")]
    IdentityMismatch(String),

    #[error("configuration error: {0}")]
    Config(String),
}
