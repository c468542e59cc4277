//! LEO orbit determination from synthetic GPS + Galileo ranges.
//!
//! Everything is expressed in ECI; the state is position (km), velocity
//! (km/s), receiver clock bias (s) and clock bias rate (s/s).

mod constellation;
mod gnss;
mod gravity;
mod lsq;
mod orbit_det;

use nalgebra::{DVector, Vector3};
use serde::{Deserialize, Serialize};

pub use constellation::{
    build_constellation, satellite_positions, Constellation, ConstellationSpec, GnssSatellite,
};
pub use gnss::{
    graphic_combine, line_of_sight_clear, simulate_measurements, GnssMeasurement,
    GnssMeasurementModel, GnssNoise, IonoModel, Pipeline, VisibilityMask,
};
pub use gravity::{gravity_accel, leo_derivatives, GravityField, LeoDynamics};
pub use lsq::{least_squares_init, LsqSolution, MAX_LSQ_ITERATIONS};
pub use orbit_det::{
    run_leo_ekf, run_leo_filter, simulate_leo_scenario, LeoConfig, LeoEpoch, LeoRun, LeoScenario,
    ProcessNoise, TruthClock,
};

/// Speed of light (km/s).
pub const SPEED_OF_LIGHT_KM_S: f64 = 299_792.458;

pub const STATE_DIM: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeoState {
    pub position: [f64; 3],
    pub velocity: [f64; 3],
    pub clock_bias: f64,
    pub clock_rate: f64,
}

impl LeoState {
    pub fn from_slice(s: &[f64]) -> Self {
        Self {
            position: [s[0], s[1], s[2]],
            velocity: [s[3], s[4], s[5]],
            clock_bias: s[6],
            clock_rate: s[7],
        }
    }

    pub fn to_vector(&self) -> DVector<f64> {
        let mut v = DVector::zeros(STATE_DIM);
        v.as_mut_slice()[0..3].copy_from_slice(&self.position);
        v.as_mut_slice()[3..6].copy_from_slice(&self.velocity);
        v[6] = self.clock_bias;
        v[7] = self.clock_rate;
        v
    }

    pub fn position(&self) -> Vector3<f64> {
        Vector3::from(self.position)
    }

    pub fn velocity(&self) -> Vector3<f64> {
        Vector3::from(self.velocity)
    }

    /// Circular orbit of radius `radius_km` at inclination `inclination_rad`,
    /// starting on the ascending node at `(radius, 0, 0)`.
    pub fn circular(radius_km: f64, inclination_rad: f64, mu: f64) -> Self {
        let speed = (mu / radius_km).sqrt();
        let (si, ci) = inclination_rad.sin_cos();
        Self {
            position: [radius_km, 0.0, 0.0],
            velocity: [0.0, speed * ci, speed * si],
            clock_bias: 0.0,
            clock_rate: 0.0,
        }
    }
}
