//! Planar ballistic re-entry tracked by a single range/elevation radar.
//!
//! State ordering is fixed as `(x, h, v, γ, C)`: downrange km, altitude km,
//! speed km/s, flight-path angle rad, aerodynamic coefficient.

mod dynamics;
mod radar;
mod trajectory;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use dynamics::{drag, reentry_derivatives, reentry_jacobian, specific_energy, ReentryDynamics};
pub use radar::{
    radar_geometry, radar_measure, radar_observe, NoisePreset, RadarGeometry, RadarMeasurement,
    RadarNoiseSpec, RadarSite,
};
pub use trajectory::{generate_reference_trajectory, TrajectoryPoint, DEFAULT_MAX_DURATION};

pub const STATE_DIM: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReentryState {
    pub x: f64,
    pub h: f64,
    pub v: f64,
    pub gamma: f64,
    pub c: f64,
}

impl ReentryState {
    pub fn from_slice(s: &[f64]) -> Self {
        Self {
            x: s[0],
            h: s[1],
            v: s[2],
            gamma: s[3],
            c: s[4],
        }
    }

    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_vec(vec![self.x, self.h, self.v, self.gamma, self.c])
    }

    /// Initial true state: 100 km altitude, 6 km/s, γ = −10°, C = 0.7.
    pub fn reference_initial() -> Self {
        Self {
            x: 0.0,
            h: 100.0,
            v: 6.0,
            gamma: (-10f64).to_radians(),
            c: 0.7,
        }
    }

    /// Filter initial estimate: 5 km downrange, 101 km, 6.05 km/s, γ = −10°, C = 0.7.
    pub fn reference_estimate() -> Self {
        Self {
            x: 5.0,
            h: 101.0,
            v: 6.05,
            gamma: (-10f64).to_radians(),
            c: 0.7,
        }
    }
}

impl From<&DVector<f64>> for ReentryState {
    fn from(v: &DVector<f64>) -> Self {
        Self::from_slice(v.as_slice())
    }
}

/// Physical constants of the vehicle, atmosphere and Earth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleParams {
    pub mass_kg: f64,
    pub area_m2: f64,
    pub rho0_kg_m3: f64,
    pub scale_height_km: f64,
    pub earth_radius_km: f64,
    pub mu_km3_s2: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self {
            mass_kg: 1000.0,
            area_m2: 0.5,
            rho0_kg_m3: 1.225,
            scale_height_km: 7.5,
            earth_radius_km: 6371.0,
            mu_km3_s2: 398_600.4418,
        }
    }
}

impl VehicleParams {
    pub fn gravity(&self, h: f64) -> f64 {
        let r = self.earth_radius_km + h;
        self.mu_km3_s2 / (r * r)
    }

    pub fn validate(&self) -> Vec<String> {
        let mut bad = Vec::new();
        for (name, v) in [
            ("mass_kg", self.mass_kg),
            ("area_m2", self.area_m2),
            ("rho0_kg_m3", self.rho0_kg_m3),
            ("scale_height_km", self.scale_height_km),
            ("earth_radius_km", self.earth_radius_km),
            ("mu_km3_s2", self.mu_km3_s2),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                bad.push(format!("vehicle.{name} must be positive and finite (got {v})"));
            }
        }
        bad
    }
}

/// `P(0) = diag(6, 6, 0.1, 0.1, 0.1)` in squared state units.
pub fn reference_initial_covariance() -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_vec(vec![6.0, 6.0, 0.1, 0.1, 0.1]))
}

/// `Q = 1e-15 I₅`.
pub fn reference_process_noise() -> DMatrix<f64> {
    DMatrix::identity(STATE_DIM, STATE_DIM) * 1e-15
}
