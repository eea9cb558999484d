use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid bounds on axis {axis}: window [{lo}, {hi}] is empty")]
    InvalidBounds { axis: usize, lo: i64, hi: i64 },

    #[error("lattice index {index:?} is outside the materialized window")]
    OutOfRange { index: Vec<i64> },

    #[error("axis {axis} out of range for a lattice with {n} degrees of freedom")]
    AxisOutOfRange { axis: usize, n: usize },

    #[error("operators live on different lattices")]
    LatticeMismatch,

    #[error("action function returned a non-finite value at m = {index:?}")]
    NonFiniteActionValue { index: Vec<i64> },

    #[error("matrix contains non-finite entries")]
    NonFiniteMatrix,

    #[error("matrix dimensions do not match: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix logarithm out of range: ||M - I|| = {defect} exceeds the series domain")]
    LogOutOfDomain { defect: f64 },

    #[error("expression term {term} is not quantizable: {reason}")]
    Unquantizable { term: String, reason: String },

    #[error("orbit radius r = {r} is not prequantizable: 2r/hbar = {n_float} is not a positive integer")]
    NotPrequantizable { r: f64, n_float: f64 },

    #[error("half-integer spin s = {s} is not supported: the construction assumes s = n/2 is an integer")]
    HalfIntegerSpin { s: f64 },

    #[error("matrix is not skew-symmetric within tolerance {tol}: defect {defect}")]
    NotSkewSymmetric { defect: f64, tol: f64 },

    #[error("matrix is not a rotation within tolerance {tol}: defect {defect}")]
    NotARotation { defect: f64, tol: f64 },

    #[error("rotation angle {angle} is within the guard band of the log branch cut at pi")]
    LogBranch { angle: f64 },

    #[error("BCH truncation order {0} is not supported (valid orders: 1..=4)")]
    BchOrder(usize),

    #[error("energy E = {energy} is not admissible: {reason}")]
    EnergyNotAdmissible { energy: f64, reason: String },

    #[error("p^2(q, E = {energy}) has {crossings} sign changes: multi-well problems are unsupported")]
    MultiWellUnsupported { energy: f64, crossings: usize },

    #[error("no root of A(E) = {target} inside the energy bracket [{lo}, {hi}]")]
    BracketFailure { target: f64, lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
