use nalgebra::{DMatrix, DVector};

use super::model::{augmented_transition, check_dims, DynamicsModel, MeasurementModel};
use super::state::StateEstimate;
use crate::error::{Error, Result};
use crate::numkit::{propagate, symmetrize};

/// Posterior plus the innovation statistics that produced it.
#[derive(Debug, Clone)]
pub struct UpdateOutcome {
    pub estimate: StateEstimate,
    pub innovation: DVector<f64>,
    pub innovation_covariance: DMatrix<f64>,
    /// Normalized innovation squared `νᵀ S⁻¹ ν`.
    pub nis: f64,
}

/// Propagates the mean through the noise-free dynamics and the covariance
/// through `Φ P Φᵀ + Γ Q Γᵀ`, with `[Φ Γ]` the top block row of the augmented
/// `exp(𝒥 dt)` at the prior mean.
pub fn ekf_predict(
    model: &dyn DynamicsModel,
    est: &StateEstimate,
    dt: f64,
    substep: f64,
) -> Result<StateEstimate> {
    let n = model.state_dim();
    check_dims("ekf state", n, est.dim())?;
    let t0 = est.epoch;
    let zero_noise = DVector::zeros(model.noise_dim());
    let field = |x: &DVector<f64>, t: f64| model.derivative(x, &zero_noise, t);
    let mean = propagate(&field, &est.mean, t0, t0 + dt, substep)?;

    let transition = augmented_transition(model, &est.mean, t0, dt)?;
    let phi = transition.view((0, 0), (n, n));
    let gamma = transition.view((0, n), (n, model.noise_dim()));
    let mut cov = phi * &est.covariance * phi.transpose()
        + gamma * model.process_noise() * gamma.transpose();
    symmetrize(&mut cov);
    StateEstimate::new(mean, cov, t0 + dt)
}

pub fn ekf_update(
    est: &StateEstimate,
    model: &dyn MeasurementModel,
    z: &DVector<f64>,
) -> Result<StateEstimate> {
    ekf_update_detailed(est, model, z).map(|o| o.estimate)
}

/// Kalman gain from the measurement Jacobian; Joseph-form covariance.
pub fn ekf_update_detailed(
    est: &StateEstimate,
    model: &dyn MeasurementModel,
    z: &DVector<f64>,
) -> Result<UpdateOutcome> {
    check_dims("measurement", model.dim(), z.len())?;
    let n = est.dim();
    let predicted = model.measure(&est.mean, est.epoch)?;
    let h = model.jacobian(&est.mean, est.epoch)?;
    check_dims("measurement jacobian columns", n, h.ncols())?;
    let r = model.noise_covariance();

    let pht = &est.covariance * h.transpose();
    let s = &h * &pht + r;
    let s_inv = invert_innovation(&s)?;
    let gain = &pht * &s_inv;
    let innovation = z - predicted;

    let mean = &est.mean + &gain * &innovation;
    let i_kh = DMatrix::identity(n, n) - &gain * &h;
    let mut cov = &i_kh * &est.covariance * i_kh.transpose() + &gain * r * gain.transpose();
    symmetrize(&mut cov);

    let nis = innovation.dot(&(&s_inv * &innovation));
    Ok(UpdateOutcome {
        estimate: StateEstimate::new(mean, cov, est.epoch)?,
        innovation,
        innovation_covariance: s,
        nis,
    })
}

pub(crate) fn invert_innovation(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let inv = s
        .clone()
        .try_inverse()
        .ok_or(Error::SingularInnovationCovariance)?;
    if inv.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularInnovationCovariance);
    }
    Ok(inv)
}
