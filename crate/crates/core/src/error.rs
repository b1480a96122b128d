use thiserror::Error;

use crate::operator::Role;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("dimension {dim} exceeds the configured cap of {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("operator is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("{role} invariant violated: {detail}")]
    RoleViolation { role: Role, detail: String },

    #[error("eigendecomposition residual {residual:e} exceeds {limit:e}")]
    Diagnostics { residual: f64, limit: f64 },

    #[error("temporal grid must be non-empty and strictly increasing")]
    InvalidGrid,

    #[error("histories live on different temporal grids")]
    GridMismatch,

    #[error("grid index {index} is out of range for a grid of {len} times")]
    GridIndex { index: usize, len: usize },

    #[error("time {time} is not on the temporal grid")]
    TimeNotOnGrid { time: f64 },

    #[error("histories are not disjoint")]
    NotDisjoint,

    #[error("partition is not exhaustive: |sum of class operators - 1| = {residual:e}")]
    NotExhaustive { residual: f64 },

    #[error("partition has the wrong size: expected {expected}, got {actual}")]
    PartitionSize { expected: usize, actual: usize },

    #[error("evidence is not operationally compatible with the history (no meet)")]
    IncompatibleEvidence,

    #[error("denominator {value:e} is below the division guard {guard:e}")]
    VanishingDenominator { value: f64, guard: f64 },

    #[error("post-selection time {t_final} precedes history time {t_history}")]
    PostSelectionNotFinal { t_final: f64, t_history: f64 },

    #[error("observable filters are not mutually orthogonal and exhaustive: {0}")]
    InvalidObservable(String),

    #[error("phase space not supported: {0}")]
    UnsupportedSpace(String),

    #[error("phase-space shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("symbol lies outside the kernel image (round-trip residual {residual:e})")]
    NotReconstructible { residual: f64 },

    #[error("array of {entries} entries exceeds the cap of {cap}")]
    CapExceeded { entries: u128, cap: u128 },

    #[error("malformed input: {0}")]
    Malformed(String),
}
