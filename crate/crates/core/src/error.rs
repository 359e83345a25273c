use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("division by zero: A must be positive")]
    ZeroDivisor,

    #[error("invalid float format: base {base}, precision {precision} (need base >= 2, precision >= 2)")]
    InvalidFormat { base: u32, precision: u32 },

    #[error("base {0} not supported; the bound coefficients are derived for base 2")]
    UnsupportedBase(u32),

    #[error("invalid slope D/A = {d}/{a}: need 0 < D < A")]
    InvalidSlope { d: u64, a: u64 },

    #[error("skew out of range D/A = {d}/{a}: need 0 < D < 2A")]
    SkewOutOfRange { d: u64, a: u64 },

    #[error("intermediate product exceeds 63-bit range: {0}")]
    OverflowRisk(String),

    #[error("empty candidate interval [{lb}, {ub}]")]
    EmptyInterval { lb: i64, ub: i64 },

    #[error("invalid skew range {0} ppm: need 0 <= range < 10^6")]
    InvalidRange(String),

    #[error("no samples to evaluate")]
    EmptySamples,
}
