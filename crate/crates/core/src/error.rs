use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid degree {k} for ambient dimension {m}")]
    InvalidDegree { k: usize, m: usize },
    #[error("index {index} out of range 1..={m}")]
    InvalidIndex { index: usize, m: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("map evaluation failed: {0}")]
    MapEvaluation(String),
    #[error("point {point:?} is off the submanifold (residual {residual:e})")]
    OffSubmanifold { point: Vec<f64>, residual: f64 },
    #[error("operation unsupported for degree {0}")]
    UnsupportedDegree(usize),
    #[error("zero k-vector has no ray")]
    ZeroVector,
    #[error("pivot component is zero")]
    PivotDegenerate,
    #[error("point is not in the requested chart (pivot component {0:e})")]
    NotInChart(f64),
    #[error("immersion failure at parameter {0:?}")]
    ImmersionFailure(Vec<f64>),
    #[error("fiber vector lies in the excluded zero section")]
    SlitDomain,
    #[error("partition of unity sums to {sum} at {point:?}")]
    InvalidPartition { point: Vec<f64>, sum: f64 },
    #[error("map reverses orientation (Jacobian determinant {0:e})")]
    OrientationViolation(f64),
    #[error("a 0-piece has no boundary")]
    NoBoundary,
    #[error("non-finite value: {0}")]
    NonFinite(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("Hilbert-form route disagrees with direct integration by {0:e}")]
    DualRouteMismatch(f64),
}

pub type Result<T> = core::result::Result<T, Error>;
