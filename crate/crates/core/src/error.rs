//! Error type shared by every module.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("labels (d={d1}, m={m1}) and (d={d2}, m={m2}) both map to entry ({i}, {j})")]
    LabelCollision {
        d1: usize,
        m1: usize,
        d2: usize,
        m2: usize,
        i: usize,
        j: usize,
    },
    #[error("label (d={d}, m={m}) maps to ({i}, {j}) outside [0, {n})")]
    OutOfBounds { d: usize, m: usize, i: i64, j: i64, n: usize },
    #[error("slot {slot} of label (d={d}, m={m}) exceeds padded sparsity {limit}")]
    SlotOutOfRange { d: usize, m: usize, slot: usize, limit: usize },
    #[error("transposition oracle invalid: {0}")]
    InvalidTranspose(String),
    #[error("prep factor incompatible with the labelling: {0}")]
    PrepIncompatible(String),
    #[error("{what}: {numerator} is not a power-of-two multiple of {denominator}")]
    NotDivisible {
        what: &'static str,
        numerator: usize,
        denominator: usize,
    },
    #[error("support of size {support} does not fit a register of dimension {dim}")]
    SupportTooLarge { support: usize, dim: usize },
    #[error("loaded value {value} for index {d} lies outside [-1, 1]")]
    OutOfUnitRange { d: usize, value: f64 },
    #[error("table of length {0} is not a bijection")]
    NotBijective(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("total dimension {dim} exceeds the dense limit {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },
    #[error("all data values are zero")]
    AllZeroValues,
    #[error("structure has no transposition oracle")]
    NoTransposeOracle,
    #[error("encoded block is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("infeasible amplification parameters: {0}")]
    InfeasibleParameters(String),
    #[error("singular value {value} exceeds the amplification range {limit}")]
    SingularValueOutOfRange { value: f64, limit: f64 },
    #[error("block entry ({i}, {j}) has imaginary part {imag:e}")]
    ComplexLeak { i: usize, j: usize, imag: f64 },
    #[error("matrix dimension {0} is not admissible")]
    BadN(usize),
    #[error("invalid shape: {0}")]
    BadShape(String),
    #[error("PREP/UNPREP row omitted: {0}")]
    PrepRowOmitted(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
