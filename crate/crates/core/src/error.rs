use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid braid word: {0}")]
    InvalidBraid(String),

    #[error("strand count mismatch: {0} vs {1}")]
    StrandMismatch(usize, usize),

    #[error("PD parse error: {0}")]
    Parse(String),

    #[error("edge {0} occurs {1} times (expected exactly twice)")]
    EdgeCount(u32, usize),

    #[error("inconsistent orientation at edge {0}")]
    Orientation(u32),

    #[error("unknown crossing {0}")]
    UnknownCrossing(usize),

    #[error("state has {got} bits but diagram has {expected} crossings")]
    StateLength { expected: usize, got: usize },

    #[error("{what} exceeds cap: {value} > {cap}")]
    CapExceeded { what: &'static str, value: usize, cap: usize },

    #[error("skein recursion exceeded depth {0}")]
    RecursionDepth(usize),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("d^2 != 0 at degree {0}")]
    NotAComplex(i64),

    #[error("not a chain map at degree {0}")]
    NotAChainMap(i64),

    #[error("polynomial is not divisible: {0}")]
    NotDivisible(String),

    #[error("non-integral exponent {0}/2 in a q-polynomial")]
    NonIntegralExponent(i64),

    #[error("trace of the first block is {0}, expected 0")]
    TraceNonZero(String),

    #[error("polynomial is not homogeneous")]
    NotHomogeneous,

    #[error("point is within {0:e} of a critical point")]
    CriticalPoint(f64),

    #[error("step size underflow at parameter {0}")]
    StepUnderflow(f64),

    #[error("start point is off the fibre by {0:e}")]
    OffFibre(f64),

    #[error("invalid configuration: {0}")]
    Configuration(String),
}

pub type Result<T> = std::result::Result<T, Error>;
