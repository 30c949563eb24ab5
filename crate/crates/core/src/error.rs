use thiserror::Error;

/// Errors raised by the discretization pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter {value} outside domain [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },
    #[error("invalid knot vector: {0}")]
    InvalidKnots(String),
    #[error("perspective map with zero weight")]
    SingularProjection,
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid refinement: {0}")]
    InvalidRefinement(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("refinement point {0:?} lies outside every element of its level")]
    Placement(Vec<f64>),
    #[error("kernel evaluated at coincident points (r = {0:e})")]
    SingularEvaluation(f64),
    #[error("incompressible material (poisson ratio 0.5) not supported")]
    IncompressibleMaterial,
    #[error("accuracy not reached: estimate {estimate:e}, error {error:e}")]
    AccuracyNotReached { estimate: f64, error: f64 },
    #[error("singular matrix encountered at pivot {0}")]
    SingularMatrix(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, Error>;
