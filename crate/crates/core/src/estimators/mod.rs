//! Filter framework: the EKF and the three unscented variants behind one
//! predict/update contract.

mod ekf;
pub mod linear;
mod model;
mod sigma;
mod state;
mod unscented;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

pub use ekf::{ekf_predict, ekf_update, ekf_update_detailed, UpdateOutcome};
pub use model::{DynamicsModel, MeasurementModel};
pub use sigma::{build_augmented, generate_sigma_points, ut_moments, SigmaPointSet, UTParams};
pub use state::StateEstimate;
pub use unscented::{
    espukf_predict, propagate_points_extrapolated, propagate_points_first_order,
    propagate_points_full, spukf_predict, ukf_predict, unscented_update,
    unscented_update_detailed,
};

use crate::error::{Error, Result};
use crate::numkit::DEFAULT_SUBSTEP;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterKind {
    Ekf,
    Ukf,
    Spukf,
    Espukf,
}

impl FilterKind {
    pub const ALL: [FilterKind; 4] = [
        FilterKind::Ekf,
        FilterKind::Ukf,
        FilterKind::Spukf,
        FilterKind::Espukf,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            FilterKind::Ekf => "ekf",
            FilterKind::Ukf => "ukf",
            FilterKind::Spukf => "spukf",
            FilterKind::Espukf => "espukf",
        }
    }

    pub fn is_unscented(self) -> bool {
        !matches!(self, FilterKind::Ekf)
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ekf" => Ok(FilterKind::Ekf),
            "ukf" => Ok(FilterKind::Ukf),
            "spukf" => Ok(FilterKind::Spukf),
            "espukf" => Ok(FilterKind::Espukf),
            other => Err(Error::InvalidArgument(format!("unknown filter '{other}'"))),
        }
    }
}

/// Integrator and unscented-transform settings shared by all filters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSettings {
    pub substep: f64,
    /// `None` selects `κ = 3 − n` for the augmented dimension `n`.
    pub kappa: Option<f64>,
}

impl Default for FilterSettings {
    fn default() -> Self {
        Self {
            substep: DEFAULT_SUBSTEP,
            kappa: None,
        }
    }
}

/// Result of one predict + update cycle.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub estimate: StateEstimate,
    /// Monotonic-clock duration of predict + update, never zero.
    pub elapsed_ns: u64,
    pub innovation: DVector<f64>,
    pub nis: f64,
}

/// Runs one predict/update cycle of `kind` from `est.epoch` to `est.epoch + dt`.
///
/// `measurement` must describe `z` at the new epoch. Only the filter work is
/// timed; building the measurement model and drawing noise happen outside.
pub fn filter_step(
    kind: FilterKind,
    dynamics: &dyn DynamicsModel,
    measurement: &dyn MeasurementModel,
    est: &StateEstimate,
    z: &DVector<f64>,
    dt: f64,
    settings: &FilterSettings,
) -> Result<StepOutcome> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    let params = if kind.is_unscented() {
        Some(UTParams::new(
            dynamics.state_dim() + dynamics.noise_dim(),
            settings.kappa,
        )?)
    } else {
        None
    };

    let start = Instant::now();
    let outcome = match (kind, params) {
        (FilterKind::Ekf, _) => {
            let prior = ekf_predict(dynamics, est, dt, settings.substep)?;
            ekf_update_detailed(&prior, measurement, z)?
        }
        (FilterKind::Ukf, Some(p)) => {
            let (prior, set) = ukf_predict(dynamics, est, dt, &p, settings.substep)?;
            unscented_update_detailed(&prior, &set, measurement, z)?
        }
        (FilterKind::Spukf, Some(p)) => {
            let (prior, set) = spukf_predict(dynamics, est, dt, &p, settings.substep)?;
            unscented_update_detailed(&prior, &set, measurement, z)?
        }
        (FilterKind::Espukf, Some(p)) => {
            let (prior, set) = espukf_predict(dynamics, est, dt, &p, settings.substep)?;
            unscented_update_detailed(&prior, &set, measurement, z)?
        }
        _ => unreachable!("unscented filters always carry UT parameters"),
    };
    let elapsed_ns = (start.elapsed().as_nanos() as u64).max(1);

    Ok(StepOutcome {
        estimate: outcome.estimate,
        elapsed_ns,
        innovation: outcome.innovation,
        nis: outcome.nis,
    })
}
