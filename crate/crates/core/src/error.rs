use thiserror::Error;

/// Failure modes shared by every estimator and scenario routine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("non-finite derivative while perturbing component {component}")]
    NonFiniteDerivative { component: usize },
    #[error("integration step produced a non-finite state at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("dimension mismatch: {what} expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("innovation covariance is singular")]
    SingularInnovationCovariance,
    #[error("speed {v} km/s is too small for the flight-path angle equation")]
    DegenerateSpeed { v: f64 },
    #[error("vehicle and radar are collocated")]
    DegenerateGeometry,
    #[error("no GNSS satellite visible at t = {t}")]
    NoVisibleSatellites { t: f64 },
    #[error("satellite geometry is rank deficient")]
    SingularGeometry,
    #[error("least squares did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("at t = {t} s: {source}")]
    AtEpoch { t: f64, source: Box<Error> },
}

impl Error {
    pub fn at(self, t: f64) -> Self {
        match self {
            already @ Error::AtEpoch { .. } => already,
            other => Error::AtEpoch {
                t,
                source: Box::new(other),
            },
        }
    }

    /// Epoch attached by [`Error::at`], if any.
    pub fn epoch(&self) -> Option<f64> {
        match self {
            Error::AtEpoch { t, .. } => Some(*t),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
