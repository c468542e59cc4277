use nalgebra::{DMatrix, DVector, Matrix4, Vector3, Vector4};

use super::SPEED_OF_LIGHT_KM_S;
use crate::error::{Error, Result};

pub const MAX_LSQ_ITERATIONS: usize = 20;
const CONVERGENCE_KM: f64 = 1e-9;
const RANK_TOLERANCE: f64 = 1e-10;

/// Single-epoch point solution.
#[derive(Debug, Clone, PartialEq)]
pub struct LsqSolution {
    pub position: Vector3<f64>,
    pub clock_bias_s: f64,
    /// Covariance of `(x, y, z, δt)` in km² and s².
    pub covariance: Matrix4<f64>,
    pub iterations: usize,
}

/// Gauss–Newton fit of position and receiver clock bias to ionosphere-free
/// ranges, started from the Earth's centre.
///
/// `sats` holds each satellite's position and clock bias; `sigma_km` is the
/// range noise used to scale the covariance.
pub fn least_squares_init(ranges: &[f64], sats: &[(Vector3<f64>, f64)], sigma_km: f64) -> Result<LsqSolution> {
    if ranges.len() != sats.len() {
        return Err(Error::DimensionMismatch {
            what: "satellites",
            expected: ranges.len(),
            got: sats.len(),
        });
    }
    if ranges.len() < 4 {
        return Err(Error::SingularGeometry);
    }
    let m = ranges.len();
    // Unknowns: position and the clock bias expressed as a range, b = c δt.
    let mut est = Vector4::zeros();
    for iteration in 1..=MAX_LSQ_ITERATIONS {
        let r = est.fixed_rows::<3>(0).into_owned();
        let mut h = DMatrix::zeros(m, 4);
        let mut resid = DVector::zeros(m);
        for (i, ((p, dt), rho)) in sats.iter().zip(ranges).enumerate() {
            let los = p - r;
            let range = los.norm();
            let u = los / range;
            h[(i, 0)] = -u.x;
            h[(i, 1)] = -u.y;
            h[(i, 2)] = -u.z;
            h[(i, 3)] = 1.0;
            resid[i] = rho - (range + est[3] - SPEED_OF_LIGHT_KM_S * dt);
        }
        let svd = h.clone().svd(false, false);
        let smax = svd.singular_values.max();
        if svd.singular_values.min() <= RANK_TOLERANCE * smax {
            return Err(Error::SingularGeometry);
        }
        let normal = h.transpose() * &h;
        let normal_inv = normal.try_inverse().ok_or(Error::SingularGeometry)?;
        let delta = &normal_inv * h.transpose() * resid;
        est += Vector4::new(delta[0], delta[1], delta[2], delta[3]);
        if delta.norm() < CONVERGENCE_KM {
            let mut cov = Matrix4::from_iterator(normal_inv.iter().copied()) * (sigma_km * sigma_km);
            // Convert the range-domain clock row/column to seconds.
            for k in 0..4 {
                cov[(3, k)] /= SPEED_OF_LIGHT_KM_S;
                cov[(k, 3)] /= SPEED_OF_LIGHT_KM_S;
            }
            return Ok(LsqSolution {
                position: est.fixed_rows::<3>(0).into_owned(),
                clock_bias_s: est[3] / SPEED_OF_LIGHT_KM_S,
                covariance: cov,
                iterations: iteration,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_LSQ_ITERATIONS,
    })
}
