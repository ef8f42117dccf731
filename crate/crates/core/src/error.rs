use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("tilt must be positive, got {0}")]
    NonPositiveTilt(f64),

    #[error("tilt {a} is below the floor {floor}; the normalizer is untruncatable there")]
    TiltBelowFloor { a: f64, floor: f64 },

    #[error("tolerance {0} outside (0, 1e-9]")]
    BadTolerance(f64),

    #[error("moment condition m*E[N1]={target} has no solution with tilt >= {floor} (m={m})")]
    TiltFloorViolation { m: u64, target: f64, floor: f64 },

    #[error("moment condition m*E[N1]={target} requires an unbounded tilt (m={m})")]
    TiltUnbounded { m: u64, target: f64 },

    #[error("alphabet size must be positive")]
    EmptyAlphabet,

    #[error("count vector has {got} entries, expected {expected}")]
    CountLengthMismatch { expected: usize, got: usize },

    #[error("token {token} outside alphabet of size {m}")]
    TokenOutOfRange { token: u64, m: u64 },

    #[error("instance (m={m}, n={n}) exceeds the cap (m<={max_m}, n<={max_n})")]
    InstanceTooLarge { m: u64, n: u64, max_m: u64, max_n: u64 },

    #[error("partition level {level} invalid for alphabet of size {m}")]
    BadPartitionLevel { level: u64, m: u64 },

    #[error("partition requires an empty part to carry zero mass (level={level}, tail={tail})")]
    DegeneratePartition { level: u64, tail: f64 },

    #[error("tail fraction {0} outside [0, 1]")]
    BadTailFraction(f64),

    #[error("envelope must be nonincreasing (violated at rank {rank})")]
    EnvelopeNotMonotone { rank: usize },

    #[error("envelope leaves no head mass for any level")]
    EnvelopeDegenerate,

    #[error("d3 undefined: alphabet remainder {m_eff} does not exceed tail mass * e = {ne}")]
    BandUndefined { m_eff: f64, ne: f64 },

    #[error("regret band requires m - n*e > 0, got m={m}, n={n}")]
    LargeAlphabetBandUndefined { m: u64, n: u64 },

    #[error("quadrature failed to reach relative tolerance {tol} (best {best})")]
    QuadratureDidNotConverge { tol: f64, best: f64 },

    #[error("lambda values must be positive")]
    NonPositiveLambda,

    #[error("total count {n} too large for the entropy coder (must be < 2^31)")]
    TotalTooLarge { n: u64 },

    #[error("token multiset does not match the count vector (symbol {symbol})")]
    TokenCountMismatch { symbol: u64 },

    #[error(transparent)]
    Format(#[from] FormatError),
}

/// Decode-side failures of the container and entropy-coded blocks.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("bad magic: expected \"TSRC\"")]
    BadMagic,

    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),

    #[error("stream truncated: {0}")]
    Truncated(&'static str),

    #[error("corrupt stream: {0}")]
    Corrupt(&'static str),

    #[error("varint overflows u64")]
    VarintOverflow,
}
