use nalgebra::{DMatrix, DVector, Vector3};
use serde::{Deserialize, Serialize};

use super::STATE_DIM;
use crate::error::Result;
use crate::estimators::DynamicsModel;

/// Point mass plus J2, J3, J4 zonal terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GravityField {
    pub mu_km3_s2: f64,
    pub radius_km: f64,
    pub j2: f64,
    pub j3: f64,
    pub j4: f64,
}

impl Default for GravityField {
    fn default() -> Self {
        Self {
            mu_km3_s2: 398_600.4418,
            radius_km: 6378.137,
            j2: 1.082_626_68e-3,
            j3: -2.532_656_49e-6,
            j4: -1.619_621_59e-6,
        }
    }
}

impl GravityField {
    pub fn point_mass(mu_km3_s2: f64, radius_km: f64) -> Self {
        Self {
            mu_km3_s2,
            radius_km,
            j2: 0.0,
            j3: 0.0,
            j4: 0.0,
        }
    }
}

/// ECI acceleration (km/s²) of the zonal field at `pos` (km).
///
/// Each axis is `−μ q / r³ (1 + J₂C₁ + J₃C₂ + J₄C₃)`; the J3 term of the z
/// axis also carries the part `+ (3/2) J₃ μ Rₑ³ / r⁵` that is not
/// proportional to z.
pub fn gravity_accel(pos: &Vector3<f64>, field: &GravityField) -> Vector3<f64> {
    let r2 = pos.norm_squared();
    let r = r2.sqrt();
    let mu_r3 = field.mu_km3_s2 / (r2 * r);
    let s = pos.z / r;
    let s2 = s * s;
    let s4 = s2 * s2;
    let q = field.radius_km / r;
    let q2 = q * q;
    let q3 = q2 * q;
    let q4 = q2 * q2;

    let c1xy = q2 * 1.5 * (1.0 - 5.0 * s2);
    let c2xy = q3 * 2.5 * (3.0 - 7.0 * s2) * s;
    let c3xy = -q4 * 0.625 * (3.0 - 42.0 * s2 + 63.0 * s4);
    let c1z = q2 * 1.5 * (3.0 - 5.0 * s2);
    let c2z = q3 * 2.5 * (6.0 - 7.0 * s2) * s;
    let c4z = -q4 * 0.625 * (15.0 - 70.0 * s2 + 63.0 * s4);

    let kxy = 1.0 + field.j2 * c1xy + field.j3 * c2xy + field.j4 * c3xy;
    let kz = 1.0 + field.j2 * c1z + field.j3 * c2z + field.j4 * c4z;
    let j3_axial = 1.5 * field.j3 * field.mu_km3_s2 * q3 / r2;
    Vector3::new(
        -mu_r3 * pos.x * kxy,
        -mu_r3 * pos.y * kxy,
        -mu_r3 * pos.z * kz + j3_axial,
    )
}

/// `[v; a(r); δṫ; −δṫ/τ]`: orbital motion plus a first-order Markov clock
/// whose bias rate decays with correlation time `tau_clock`.
pub fn leo_derivatives(x: &[f64], field: &GravityField, tau_clock: f64) -> [f64; STATE_DIM] {
    let a = gravity_accel(&Vector3::new(x[0], x[1], x[2]), field);
    [x[3], x[4], x[5], a.x, a.y, a.z, x[7], -x[7] / tau_clock]
}

/// EKF dynamics: process noise drives the velocity and both clock states.
#[derive(Debug, Clone)]
pub struct LeoDynamics {
    field: GravityField,
    tau_clock: f64,
    noise_input: DMatrix<f64>,
    q: DMatrix<f64>,
}

impl LeoDynamics {
    /// `q_velocity` (km²/s²) and `q_clock` (s², (s/s)²) per interval.
    pub fn new(field: GravityField, tau_clock: f64, q_velocity: f64, q_clock: f64) -> Self {
        let mut noise_input = DMatrix::zeros(STATE_DIM, 5);
        for k in 0..5 {
            noise_input[(3 + k, k)] = 1.0;
        }
        let q = DMatrix::from_diagonal(&DVector::from_vec(vec![
            q_velocity, q_velocity, q_velocity, q_clock, q_clock,
        ]));
        Self {
            field,
            tau_clock,
            noise_input,
            q,
        }
    }

    pub fn field(&self) -> &GravityField {
        &self.field
    }
}

impl DynamicsModel for LeoDynamics {
    fn state_dim(&self) -> usize {
        STATE_DIM
    }

    fn drift(&self, x: &DVector<f64>, _t: f64) -> Result<DVector<f64>> {
        Ok(DVector::from_row_slice(&leo_derivatives(
            x.as_slice(),
            &self.field,
            self.tau_clock,
        )))
    }

    fn noise_input(&self) -> &DMatrix<f64> {
        &self.noise_input
    }

    fn process_noise(&self) -> &DMatrix<f64> {
        &self.q
    }
}
