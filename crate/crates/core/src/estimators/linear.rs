//! Linear time-invariant models. Every filter is exact on these, which makes
//! them the reference case for cross-checking the four algorithms.

use nalgebra::{DMatrix, DVector};

use super::model::{DynamicsModel, MeasurementModel};
use crate::error::Result;

/// `ẋ = A x + ν`.
#[derive(Debug, Clone)]
pub struct LinearDynamics {
    a: DMatrix<f64>,
    noise_input: DMatrix<f64>,
    q: DMatrix<f64>,
}

impl LinearDynamics {
    pub fn new(a: DMatrix<f64>, q: DMatrix<f64>) -> Self {
        let n = a.nrows();
        Self {
            a,
            noise_input: DMatrix::identity(n, n),
            q,
        }
    }

    /// No process noise inputs at all (noise dimension 0).
    pub fn noiseless(a: DMatrix<f64>) -> Self {
        let n = a.nrows();
        Self {
            a,
            noise_input: DMatrix::zeros(n, 0),
            q: DMatrix::zeros(0, 0),
        }
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }
}

impl DynamicsModel for LinearDynamics {
    fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    fn drift(&self, x: &DVector<f64>, _t: f64) -> Result<DVector<f64>> {
        Ok(&self.a * x)
    }

    fn noise_input(&self) -> &DMatrix<f64> {
        &self.noise_input
    }

    fn process_noise(&self) -> &DMatrix<f64> {
        &self.q
    }
}

/// `z = H x + w`.
#[derive(Debug, Clone)]
pub struct LinearMeasurement {
    h: DMatrix<f64>,
    r: DMatrix<f64>,
}

impl LinearMeasurement {
    pub fn new(h: DMatrix<f64>, r: DMatrix<f64>) -> Self {
        Self { h, r }
    }

    pub fn h(&self) -> &DMatrix<f64> {
        &self.h
    }
}

impl MeasurementModel for LinearMeasurement {
    fn dim(&self) -> usize {
        self.h.nrows()
    }

    fn measure(&self, x: &DVector<f64>, _t: f64) -> Result<DVector<f64>> {
        Ok(&self.h * x)
    }

    fn noise_covariance(&self) -> &DMatrix<f64> {
        &self.r
    }
}
