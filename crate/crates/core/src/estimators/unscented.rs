use nalgebra::{DMatrix, DVector};

use super::ekf::{invert_innovation, UpdateOutcome};
use super::model::{augmented_jacobian, augmented_transition, check_dims, DynamicsModel, MeasurementModel};
use super::sigma::{build_augmented, generate_sigma_points, ut_moments, SigmaPointSet, UTParams};
use super::state::StateEstimate;
use crate::error::Result;
use crate::numkit::{mat_exp, propagate, symmetrize};

/// Integrates the state part of an augmented point over `[t0, t0 + dt]`,
/// holding its noise part as a constant derivative bias.
fn propagate_augmented(
    model: &dyn DynamicsModel,
    point: &DVector<f64>,
    t0: f64,
    dt: f64,
    substep: f64,
) -> Result<DVector<f64>> {
    let n = model.state_dim();
    let x = point.rows(0, n).into_owned();
    let noise = point.rows(n, point.len() - n).into_owned();
    let field = |x: &DVector<f64>, t: f64| model.derivative(x, &noise, t);
    let moved = propagate(&field, &x, t0, t0 + dt, substep)?;
    let mut out = point.clone();
    out.rows_mut(0, n).copy_from(&moved);
    Ok(out)
}

/// Every sigma point through the full nonlinear dynamics.
pub fn propagate_points_full(
    model: &dyn DynamicsModel,
    set: &SigmaPointSet,
    t0: f64,
    dt: f64,
    substep: f64,
) -> Result<SigmaPointSet> {
    let points = set
        .points
        .iter()
        .map(|p| propagate_augmented(model, p, t0, dt, substep))
        .collect::<Result<Vec<_>>>()?;
    Ok(SigmaPointSet {
        points,
        weights: set.weights.clone(),
    })
}

/// Only the centre point is integrated; the others are `X₀⁻ + exp(𝒥 dt) ΔXᵢ`
/// with `𝒥` the augmented Jacobian at the prior centre.
pub fn propagate_points_first_order(
    model: &dyn DynamicsModel,
    set: &SigmaPointSet,
    t0: f64,
    dt: f64,
    substep: f64,
) -> Result<SigmaPointSet> {
    let n = model.state_dim();
    let center = &set.points[0];
    let moved_center = propagate_augmented(model, center, t0, dt, substep)?;
    let phi = augmented_transition(model, &center.rows(0, n).into_owned(), t0, dt)?;
    let points = set
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if i == 0 {
                moved_center.clone()
            } else {
                &moved_center + &phi * (p - center)
            }
        })
        .collect();
    Ok(SigmaPointSet {
        points,
        weights: set.weights.clone(),
    })
}

/// Richardson-extrapolated reconstruction:
///
/// ```text
/// N₁ = X₀⁻ + exp(𝒥 dt) ΔX
/// N₂ = X₀⁻ + exp(𝒥 dt) ΔX/2 + exp(𝒥' dt) ΔX/2,   𝒥' at X₀ + ΔX/2
/// Xᵢ⁻ = 2 N₂ − N₁
/// ```
pub fn propagate_points_extrapolated(
    model: &dyn DynamicsModel,
    set: &SigmaPointSet,
    t0: f64,
    dt: f64,
    substep: f64,
) -> Result<SigmaPointSet> {
    let n = model.state_dim();
    let center = &set.points[0];
    let center_state = center.rows(0, n).into_owned();
    let moved_center = propagate_augmented(model, center, t0, dt, substep)?;
    let phi = augmented_transition(model, &center_state, t0, dt)?;

    let mut points = Vec::with_capacity(set.len());
    points.push(moved_center.clone());
    for p in &set.points[1..] {
        let offset = p - center;
        let half = &offset * 0.5;
        let state_off = offset.rows(0, n);
        let noise_off = offset.rows(n, offset.len() - n);

        // 𝒥' depends on the offset only through its state part; when that is
        // zero it coincides with 𝒥. A pure state offset stays in the state
        // block, where exp(𝒥' dt) acts as the n×n exp(∂f/∂x' dt).
        let mapped_prime = if state_off.iter().all(|&v| v == 0.0) {
            &phi * &half
        } else {
            let mid = &center_state + state_off * 0.5;
            let jac = model.state_jacobian(&mid, t0)?;
            check_dims("state jacobian", n, jac.nrows())?;
            if noise_off.iter().all(|&v| v == 0.0) {
                let mut v = DVector::zeros(offset.len());
                v.rows_mut(0, n)
                    .copy_from(&(mat_exp(&jac, dt) * half.rows(0, n)));
                v
            } else {
                mat_exp(&augmented_jacobian(&jac, model.noise_input()), dt) * &half
            }
        };
        let first = &moved_center + &phi * &offset;
        let second = &moved_center + &phi * &half + mapped_prime;
        points.push(second * 2.0 - first);
    }
    Ok(SigmaPointSet {
        points,
        weights: set.weights.clone(),
    })
}

fn prior_set(model: &dyn DynamicsModel, est: &StateEstimate, params: &UTParams) -> Result<SigmaPointSet> {
    check_dims("state", model.state_dim(), est.dim())?;
    check_dims(
        "augmented dimension",
        model.state_dim() + model.noise_dim(),
        params.augmented_dim,
    )?;
    let (mean, cov) = build_augmented(est, model.process_noise())?;
    generate_sigma_points(&mean, &cov, params)
}

fn predicted_estimate(set: &SigmaPointSet, n: usize, epoch: f64) -> Result<StateEstimate> {
    let (mean, cov) = ut_moments(set);
    let mut p = cov.view((0, 0), (n, n)).into_owned();
    symmetrize(&mut p);
    StateEstimate::new(mean.rows(0, n).into_owned(), p, epoch)
}

type Predictor = fn(&dyn DynamicsModel, &SigmaPointSet, f64, f64, f64) -> Result<SigmaPointSet>;

fn predict_with(
    propagate_set: Predictor,
    model: &dyn DynamicsModel,
    est: &StateEstimate,
    dt: f64,
    params: &UTParams,
    substep: f64,
) -> Result<(StateEstimate, SigmaPointSet)> {
    let prior = prior_set(model, est, params)?;
    let moved = propagate_set(model, &prior, est.epoch, dt, substep)?;
    let predicted = predicted_estimate(&moved, model.state_dim(), est.epoch + dt)?;
    Ok((predicted, moved))
}

/// Augmented UKF prediction: all `2n + 1` points integrated.
pub fn ukf_predict(
    model: &dyn DynamicsModel,
    est: &StateEstimate,
    dt: f64,
    params: &UTParams,
    substep: f64,
) -> Result<(StateEstimate, SigmaPointSet)> {
    predict_with(propagate_points_full, model, est, dt, params, substep)
}

/// Single-propagation prediction with first-order sigma point reconstruction.
pub fn spukf_predict(
    model: &dyn DynamicsModel,
    est: &StateEstimate,
    dt: f64,
    params: &UTParams,
    substep: f64,
) -> Result<(StateEstimate, SigmaPointSet)> {
    predict_with(propagate_points_first_order, model, est, dt, params, substep)
}

/// Single-propagation prediction with Richardson-extrapolated reconstruction.
pub fn espukf_predict(
    model: &dyn DynamicsModel,
    est: &StateEstimate,
    dt: f64,
    params: &UTParams,
    substep: f64,
) -> Result<(StateEstimate, SigmaPointSet)> {
    predict_with(propagate_points_extrapolated, model, est, dt, params, substep)
}

pub fn unscented_update(
    est: &StateEstimate,
    set: &SigmaPointSet,
    model: &dyn MeasurementModel,
    z: &DVector<f64>,
) -> Result<StateEstimate> {
    unscented_update_detailed(est, set, model, z).map(|o| o.estimate)
}

/// Correction from the propagated sigma points: their images under `h` give
/// the predicted measurement, innovation covariance and cross covariance.
pub fn unscented_update_detailed(
    est: &StateEstimate,
    set: &SigmaPointSet,
    model: &dyn MeasurementModel,
    z: &DVector<f64>,
) -> Result<UpdateOutcome> {
    let m = model.dim();
    check_dims("measurement", m, z.len())?;
    let n = est.dim();
    let images = set
        .points
        .iter()
        .map(|p| model.measure(&p.rows(0, n).into_owned(), est.epoch))
        .collect::<Result<Vec<_>>>()?;

    let mut z_mean = DVector::zeros(m);
    for (zi, &w) in images.iter().zip(&set.weights) {
        z_mean.axpy(w, zi, 1.0);
    }
    let mut s = model.noise_covariance().clone();
    let mut cross = DMatrix::zeros(n, m);
    for ((p, zi), &w) in set.points.iter().zip(&images).zip(&set.weights) {
        let dz = zi - &z_mean;
        let dx = p.rows(0, n) - &est.mean;
        s.ger(w, &dz, &dz, 1.0);
        cross.ger(w, &dx, &dz, 1.0);
    }
    symmetrize(&mut s);

    let s_inv = invert_innovation(&s)?;
    let gain = &cross * &s_inv;
    let innovation = z - z_mean;
    let mean = &est.mean + &gain * &innovation;
    let mut cov = &est.covariance - &gain * &s * gain.transpose();
    symmetrize(&mut cov);
    let nis = innovation.dot(&(&s_inv * &innovation));
    Ok(UpdateOutcome {
        estimate: StateEstimate::new(mean, cov, est.epoch)?,
        innovation,
        innovation_covariance: s,
        nis,
    })
}
