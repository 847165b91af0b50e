use thiserror::Error;

/// Errors raised by the algebra kernels and the certification pipelines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u64),
    #[error("no irreducible modulus of degree {k} over F_{p} found within the attempt budget")]
    IrreducibleSearchExhausted { p: u64, k: usize },
    #[error("modulus is not irreducible of degree {k} over F_{p}")]
    ReducibleModulus { p: u64, k: usize },
    #[error("field {p}^{k} does not fit the 63-bit element encoding")]
    FieldTooLarge { p: u64, k: usize },
    #[error("incompatible fields: {0}")]
    IncompatibleFields(String),
    #[error("p = {p} divides n = {n}")]
    PDividesN { p: u64, n: u64 },
    #[error("zero polynomial input")]
    ZeroInput,
    #[error("splitting degree exceeds extension cap {cap}")]
    ExtensionCapExceeded { cap: usize },
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("point is not on the curve")]
    PointNotOnCurve,
    #[error("point is singular on the curve")]
    PointSingular,
    #[error("line is a component of the curve")]
    LineIsComponent,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("group closure exceeded cap {cap}")]
    ClosureCapExceeded { cap: usize },
    #[error("brute scan over a field of order {q} exceeds cap {cap}")]
    BruteCapExceeded { q: u64, cap: u64 },
    #[error("exact collineation mode degenerate: {0}")]
    ExactModeDegenerate(String),
    #[error("projection center is a singular point of the curve")]
    CenterSingular,
    #[error("every sampled specialization was ramified or degenerate")]
    AllSpecializationsRamified,
    #[error("specializations would need an extension of degree {degree}, beyond the 63-bit encoding")]
    NoScreeningField { degree: u64 },
    #[error("no squarefree fiber found for the deck computation")]
    DegenerateFibers,
    #[error("symmetrization ladder exhausted without a degree-{order} invariant")]
    LadderExhausted { order: usize },
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("condition (b) has no witness")]
    ConditionBFails,
    #[error("verification failed at stage {0}")]
    VerificationFailed(String),
    #[error("not an additive subgroup: {0}")]
    NotSubgroup(String),
    #[error("subgroup not stable under scaling: {0}")]
    ScalingUnstable(String),
    #[error("only the degenerate branch exists")]
    DegenerateOnly,
    #[error("field too small: {0}")]
    FieldTooSmall(String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
