use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Mean, error covariance and epoch: what every filter consumes and produces.
#[derive(Debug, Clone, PartialEq)]
pub struct StateEstimate {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
    /// Seconds since scenario start.
    pub epoch: f64,
}

impl StateEstimate {
    pub fn new(mean: DVector<f64>, covariance: DMatrix<f64>, epoch: f64) -> Result<Self> {
        let n = mean.len();
        if covariance.nrows() != n || covariance.ncols() != n {
            return Err(Error::DimensionMismatch {
                what: "covariance",
                expected: n,
                got: covariance.nrows().max(covariance.ncols()),
            });
        }
        Ok(Self {
            mean,
            covariance,
            epoch,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Largest |P - Pᵀ| entry.
    pub fn asymmetry(&self) -> f64 {
        (&self.covariance - self.covariance.transpose()).amax()
    }
}
