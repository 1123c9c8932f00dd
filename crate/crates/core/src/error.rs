use thiserror::Error;

/// Failures raised by the geometry, flow and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degenerate metric: pivot {pivot:e} at index {index} is below tolerance {tolerance:e}")]
    DegenerateMetric { index: usize, pivot: f64, tolerance: f64 },

    #[error("tensor is not symmetric: |S[{i}][{j}] - S[{j}][{i}]| = {gap:e}")]
    Asymmetric { i: usize, j: usize, gap: f64 },

    #[error("insufficient jet order: need {needed}, have {available}")]
    InsufficientOrder { needed: usize, available: usize },

    #[error("time {t} outside validity interval ({lo}, {hi})")]
    OutsideInterval { t: f64, lo: f64, hi: f64 },

    #[error("point {point:?} outside chart domain")]
    OutsideDomain { point: Vec<f64> },

    #[error("metric degenerates at t = {time}: {detail}")]
    Degeneration { time: f64, detail: String },

    #[error("grid too small: {n} points per axis, need at least {min}")]
    GridTooSmall { n: usize, min: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(GeometryError::DimensionMismatch { expected, found })
    }
}
