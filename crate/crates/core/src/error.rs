use thiserror::Error;

/// Errors raised anywhere in the lab.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("ball of radius {radius} around {center:?} leaves the domain")]
    BallOutsideDomain { center: Vec<f64>, radius: f64 },

    #[error("quadrature order {order} exceeds the supported maximum {max}")]
    OrderTooLarge { order: usize, max: usize },

    #[error("metric is not positive definite at {point:?}")]
    NotPositiveDefinite { point: Vec<f64> },

    #[error("assembled operator is not positive definite: {0}")]
    IndefiniteSystem(String),

    #[error("solver did not converge in {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64, history: Vec<f64> },

    #[error("fit space is empty for k = {k}, d_max = {d_max}")]
    EmptyFitSpace { k: usize, d_max: usize },

    #[error("tangent map undefined: field is constant at this scale")]
    ConstantAtScale,

    #[error("degree {0} is below the supported minimum")]
    DegreeTooSmall(usize),

    #[error("resolution mismatch: {0}")]
    Resolution(String),

    #[error("{0}")]
    Format(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> LabError {
    LabError::InvalidParameter { name, reason: reason.into() }
}
