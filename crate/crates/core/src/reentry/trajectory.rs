use nalgebra::DVector;

use super::{reentry_derivatives, ReentryState, VehicleParams};
use crate::error::{Error, Result};
use crate::numkit::rk4_step;

/// Default cut-off for the reference trajectory (s).
pub const DEFAULT_MAX_DURATION: f64 = 120.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub state: ReentryState,
}

/// RK4 integration of the noise-free dynamics at fixed step `dt`, starting at
/// `t = 0` and stopping after the first point with `h ≤ 0` or once
/// `t ≥ max_duration`.
pub fn generate_reference_trajectory(
    init: &ReentryState,
    p: &VehicleParams,
    dt: f64,
    max_duration: f64,
) -> Result<Vec<TrajectoryPoint>> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("trajectory step must be positive, got {dt}")));
    }
    let field = |x: &DVector<f64>, _t: f64| {
        reentry_derivatives(&ReentryState::from_slice(x.as_slice()), p)
            .map(|d| DVector::from_row_slice(&d))
    };
    let mut out = vec![TrajectoryPoint { t: 0.0, state: *init }];
    let mut x = init.to_vector();
    let mut k = 0usize;
    loop {
        let t = k as f64 * dt;
        if x[1] <= 0.0 || t >= max_duration - 1e-9 * dt {
            break;
        }
        x = rk4_step(&field, &x, t, dt)?;
        k += 1;
        out.push(TrajectoryPoint {
            t: k as f64 * dt,
            state: ReentryState::from_slice(x.as_slice()),
        });
    }
    Ok(out)
}
