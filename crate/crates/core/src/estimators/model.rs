use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numkit::{mat_exp, numerical_jacobian, numerical_jacobian_map};

/// Continuous-time dynamics `ẋ = f(x, t) + B ν` with white process noise `ν ~ N(0, Q)`.
///
/// Over one filter interval the augmented filters hold each noise sigma
/// offset constant, so `ν` acts as an additive derivative bias.
pub trait DynamicsModel: Sync {
    fn state_dim(&self) -> usize;

    fn noise_dim(&self) -> usize {
        self.process_noise().nrows()
    }

    /// Noise-free part of the derivative.
    fn drift(&self, x: &DVector<f64>, t: f64) -> Result<DVector<f64>>;

    /// Noise input matrix `B = ∂f/∂ν` (state_dim × noise_dim).
    fn noise_input(&self) -> &DMatrix<f64>;

    /// Process noise covariance `Q`, added once per prediction interval.
    fn process_noise(&self) -> &DMatrix<f64>;

    fn derivative(&self, x: &DVector<f64>, noise: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
        let mut d = self.drift(x, t)?;
        d.gemv(1.0, self.noise_input(), noise, 1.0);
        Ok(d)
    }

    /// `∂f/∂x`; central differences unless a model supplies the analytic form.
    fn state_jacobian(&self, x: &DVector<f64>, t: f64) -> Result<DMatrix<f64>> {
        numerical_jacobian(|p, t| self.drift(p, t), x, t)
    }
}

/// Measurement `z = h(x, t) + w`, `w ~ N(0, R)`.
pub trait MeasurementModel {
    fn dim(&self) -> usize;

    fn measure(&self, x: &DVector<f64>, t: f64) -> Result<DVector<f64>>;

    fn noise_covariance(&self) -> &DMatrix<f64>;

    /// `∂h/∂x`; central differences unless a model supplies the analytic form.
    fn jacobian(&self, x: &DVector<f64>, t: f64) -> Result<DMatrix<f64>> {
        numerical_jacobian_map(|p| self.measure(p, t), x)
    }
}

/// Augmented Jacobian `[[∂f/∂x, B], [0, 0]]` of `(x, ν) ↦ (f(x) + Bν, 0)`.
pub(crate) fn augmented_jacobian(state_jac: &DMatrix<f64>, noise_input: &DMatrix<f64>) -> DMatrix<f64> {
    let n = state_jac.nrows();
    let q = noise_input.ncols();
    let mut j = DMatrix::zeros(n + q, n + q);
    j.view_mut((0, 0), (n, n)).copy_from(state_jac);
    j.view_mut((0, n), (n, q)).copy_from(noise_input);
    j
}

/// `exp(𝒥 dt)` for the augmented Jacobian at `x`.
///
/// The top-left block is the state transition matrix, the top-right block
/// maps a constant noise bias over the interval onto the state.
pub(crate) fn augmented_transition(
    model: &dyn DynamicsModel,
    x: &DVector<f64>,
    t: f64,
    dt: f64,
) -> Result<DMatrix<f64>> {
    let jx = model.state_jacobian(x, t)?;
    check_dims("state jacobian", model.state_dim(), jx.nrows())?;
    Ok(mat_exp(&augmented_jacobian(&jx, model.noise_input()), dt))
}

pub(crate) fn check_dims(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { what, expected, got })
    }
}
