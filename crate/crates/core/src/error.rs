use thiserror::Error;

use crate::deform::Grid2D;

/// Errors produced by the library.
///
/// Variants fall into two groups: contract violations on the inputs
/// (`is_computation() == false`) and failures of the numerical pipeline
/// itself (`is_computation() == true`).
#[derive(Debug, Error)]
pub enum Error {
    #[error("monitor function must be strictly positive (found {value} at node {index})")]
    NonPositiveMonitor { index: usize, value: f64 },
    #[error("image has no pixels")]
    EmptyImage,
    #[error("lattice must have at least 3x3 nodes, got {nx}x{ny}")]
    LatticeTooSmall { nx: usize, ny: usize },
    #[error("lattice mismatch: {left:?} vs {right:?}")]
    LatticeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("expected {expected} samples, got {actual}")]
    SampleCount { expected: usize, actual: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("time {0} outside [0, 1]")]
    TimeOutOfRange(f64),
    #[error("Neumann problem is incompatible: mean of right-hand side is {mean:e}")]
    IncompatibleRhs { mean: f64 },
    #[error("Poisson solve did not reach tolerance {tol:e} (residual {residual:e} after {iterations} iterations)")]
    SolverDiverged {
        residual: f64,
        tol: f64,
        iterations: usize,
    },
    #[error("step count must be at least 1")]
    InvalidSteps,
    #[error("deformed grid folds: minimum interior Jacobian determinant {min_jacobian:e} at node {index}")]
    FoldDetected {
        min_jacobian: f64,
        index: usize,
        grid: Box<Grid2D>,
    },
    #[error("field contains non-finite values")]
    NonFiniteField,
    #[error("image dimensions differ: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("SSIM window {window} exceeds image size {width}x{height}")]
    WindowTooLarge {
        window: usize,
        width: usize,
        height: usize,
    },
    #[error("invalid SSIM parameters: {0}")]
    InvalidSsimParams(&'static str),
    #[error("invalid score {score} for image {image_id}, method {method_id} (expected 1..=5)")]
    InvalidScore {
        image_id: String,
        method_id: String,
        score: i64,
    },
    #[error("ratings table is empty")]
    EmptyTable,
    #[error("probability {value} at index {index} not in (0, 1]")]
    InvalidProbability { index: usize, value: f64 },
    #[error("discriminator batch is empty")]
    EmptyBatch,
    #[error("loss inputs must be finite and non-negative")]
    NonFiniteInput,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Image(#[from] image::ImageError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the numerical pipeline (folds, solver failures,
    /// incompatible inputs), false for malformed arguments and I/O.
    pub fn is_computation(&self) -> bool {
        matches!(
            self,
            Error::NonPositiveMonitor { .. }
                | Error::LatticeMismatch { .. }
                | Error::IncompatibleRhs { .. }
                | Error::SolverDiverged { .. }
                | Error::FoldDetected { .. }
                | Error::NonFiniteField
                | Error::DimensionMismatch { .. }
                | Error::WindowTooLarge { .. }
                | Error::InvalidScore { .. }
                | Error::EmptyTable
                | Error::InvalidProbability { .. }
                | Error::EmptyBatch
                | Error::NonFiniteInput
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
