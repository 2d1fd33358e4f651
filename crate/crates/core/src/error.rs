//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("spatial dimension {0} is not supported (expected 2, 3 or 4)")]
    InvalidDimension(usize),
    #[error("linear size {0} is too small (need L >= 2)")]
    SizeTooSmall(usize),
    #[error("linear size {0} exceeds the supported maximum of {1}")]
    SizeTooLarge(usize, usize),
    #[error("invalid cell: {0}")]
    InvalidCell(String),
    #[error("cell dimension gap must be exactly 1 (got {from} -> {to})")]
    DimensionGap { from: usize, to: usize },
    #[error("plane axes must be distinct in-range axes")]
    InvalidPlaneAxes,
    #[error("plane offset out of range")]
    OffsetOutOfRange,

    #[error("configuration length {got} does not match cell count {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("link configuration is not a cycle: node {0} has odd degree")]
    NotACycle(usize),
    #[error("configuration has a nonempty boundary where a closed one is required")]
    NotClosed,
    #[error("a loop exceeds the short-loop threshold")]
    LongLoopPresent,
    #[error("short-loop fraction {0} is outside its admissible range")]
    InvalidFraction(f64),
    #[error("operation requires spatial dimension 3 or 4 (got {0})")]
    UnsupportedDimension(usize),
    #[error("malformed configuration string: {0}")]
    ParseConfig(String),

    #[error("cannot walk an empty loop")]
    EmptyLoop,
    #[error("loop winds around the torus; no confined surface exists")]
    NonContractible,

    #[error("rate table violates detailed balance at gap {0}")]
    DetailedBalance(f64),
    #[error("rate values must lie in (0, {0}]")]
    RateRange(f64),
    #[error("estimator input is empty")]
    EmptySamples,
    #[error("need at least {0} samples for batch-mean error bars")]
    TooFewSamples(usize),
    #[error("input must be non-negative (got {0})")]
    NegativeInput(f64),
    #[error("input {0} outside [-1, 1]")]
    OutOfUnitRange(f64),
    #[error("state space too large: {0} spins exceeds enumeration cap of {1}")]
    EnumerationCap(usize, usize),
    #[error("mid-run invariant violated: {0}")]
    InvariantViolation(String),

    #[error("system has {0} spins; the exact generator is capped at {1}")]
    SpinCap(usize, usize),
    #[error("pauli term {0} is not Hermitian (odd X/Z overlap)")]
    NonHermitianTerm(String),
    #[error("bath table has no entry for frequency {0}")]
    MissingBathEntry(f64),
    #[error("coupling set is not ergodic: a non-identity Pauli commutes with every generator")]
    NonErgodic,
    #[error("observable must commute with every stabilizer term")]
    CommutationPrecondition,
    #[error("observable is not an eigenvector of the Hamiltonian adjoint action")]
    NotEigenvector,
    #[error("observable has zero norm after projecting out the identity")]
    ZeroNormObservable,
    #[error("malformed pauli string: {0}")]
    ParsePauli(String),
}

pub type Result<T> = std::result::Result<T, Error>;
