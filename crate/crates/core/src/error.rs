use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("p = {0} is not an odd prime")]
    InvalidPrime(u32),

    #[error("m must be even and at least 2 (got {0})")]
    InvalidEvenRank(usize),

    #[error("n must be even and at least 2 (got {0})")]
    InvalidOddRank(usize),

    #[error("truncation tuple must have length m = {expected} (got {actual})")]
    TruncationLength { expected: usize, actual: usize },

    #[error("truncation entries must be positive integers")]
    TruncationEntry,

    #[error("truncation height p^t - 1 overflows for p = {p}, t = {t}")]
    TruncationOverflow { p: u32, t: u32 },

    #[error("operands live over different parameter sets: {left} vs {right}")]
    ParameterMismatch { left: String, right: String },

    #[error("direction index {index} out of range 1..={s}")]
    DirectionOutOfRange { index: usize, s: usize },

    #[error("matrix entry ({row}, {col}) outside a {rows} x {cols} matrix")]
    EntryOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("structure constant [{i},{j}] -> e{k} breaks super skew-symmetry")]
    SkewSymmetry { i: usize, j: usize, k: usize },

    #[error("structure constant [{i},{j}] -> e{k} breaks parity compatibility")]
    ParityCompatibility { i: usize, j: usize, k: usize },

    #[error("element is not a simultaneous eigenvector of the torus")]
    NotAnEigenvector,

    #[error("invalid weight-space request: {0}")]
    InvalidWeightSpace(String),

    #[error("weight-blocked solving needs weight labels on the algebra")]
    MissingWeights,

    #[error("bilinear map is not inner: {0}")]
    NotInner(String),

    #[error("all brackets vanish, so no scalar can be extracted")]
    Degenerate,

    #[error("construction invariant violated: {0}")]
    Invariant(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("unknown value {value:?} for {what}")]
    UnknownValue { what: &'static str, value: String },
}
