use nalgebra::{DMatrix, DVector, Vector3};
use serde::{Deserialize, Serialize};

use super::{
    build_constellation, graphic_combine, least_squares_init, leo_derivatives, simulate_measurements,
    ConstellationSpec, GnssMeasurement, GnssMeasurementModel, GnssNoise, GravityField, IonoModel,
    LeoDynamics, LeoState, LsqSolution, Pipeline, VisibilityMask, STATE_DIM,
};
use crate::error::{Error, Result};
use crate::estimators::{filter_step, FilterKind, FilterSettings, StateEstimate};
use crate::numkit::propagate;
use crate::rng::RunRng;

/// Receiver clock truth: a linear ramp `bias + rate t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthClock {
    pub bias_s: f64,
    pub rate: f64,
}

impl Default for TruthClock {
    fn default() -> Self {
        Self { bias_s: 1e-3, rate: 1e-9 }
    }
}

/// Diagonal filter process noise per interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessNoise {
    /// Velocity rows, km²/s².
    pub velocity: f64,
    /// Clock bias (s²) and bias-rate rows.
    pub clock: f64,
}

impl Default for ProcessNoise {
    fn default() -> Self {
        Self { velocity: 1e-12, clock: 1e-18 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LeoConfig {
    pub gravity: GravityField,
    pub constellation: ConstellationSpec,
    /// Initial circular orbit of the receiver satellite.
    pub orbit_radius_km: f64,
    pub orbit_inclination_deg: f64,
    pub truth_clock: TruthClock,
    pub tau_clock_s: f64,
    pub iono: IonoModel,
    /// Noise put on the simulated ranges.
    pub noise: GnssNoise,
    /// Noise the filter assumes; defaults to `noise`.
    pub filter_noise: Option<GnssNoise>,
    pub mask: VisibilityMask,
    pub pipeline: Pipeline,
    pub process_noise: ProcessNoise,
    pub interval_s: f64,
    pub epochs: usize,
    pub substep_s: f64,
    pub kappa: Option<f64>,
}

impl Default for LeoConfig {
    fn default() -> Self {
        Self {
            gravity: GravityField::default(),
            constellation: ConstellationSpec::default(),
            orbit_radius_km: 6892.0,
            orbit_inclination_deg: 97.4,
            truth_clock: TruthClock::default(),
            tau_clock_s: 3600.0,
            iono: IonoModel::default(),
            noise: GnssNoise::default(),
            filter_noise: None,
            mask: VisibilityMask::default(),
            pipeline: Pipeline::Graphic,
            process_noise: ProcessNoise::default(),
            interval_s: 1.0,
            epochs: 300,
            substep_s: 1.0,
            kappa: None,
        }
    }
}

impl LeoConfig {
    pub fn assumed_noise(&self) -> GnssNoise {
        self.filter_noise.unwrap_or(self.noise)
    }

    pub fn settings(&self) -> FilterSettings {
        FilterSettings {
            substep: self.substep_s,
            kappa: self.kappa,
        }
    }

    pub fn initial_truth(&self) -> LeoState {
        let mut s = LeoState::circular(
            self.orbit_radius_km,
            self.orbit_inclination_deg.to_radians(),
            self.gravity.mu_km3_s2,
        );
        s.clock_bias = self.truth_clock.bias_s;
        s.clock_rate = self.truth_clock.rate;
        s
    }

    /// Every violated constraint, one message each.
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        let mut check = |ok: bool, msg: &str| {
            if !ok {
                v.push(msg.to_string());
            }
        };
        check(self.gravity.mu_km3_s2 > 0.0, "gravity.mu_km3_s2 must be positive");
        check(self.gravity.radius_km > 0.0, "gravity.radius_km must be positive");
        check(
            self.orbit_radius_km > self.gravity.radius_km,
            "orbit_radius_km must exceed gravity.radius_km",
        );
        check(self.tau_clock_s > 0.0, "tau_clock_s must be positive");
        check(self.interval_s > 0.0, "interval_s must be positive");
        check(self.substep_s > 0.0, "substep_s must be positive");
        check(self.epochs >= 4, "epochs must be at least 4");
        check(
            self.constellation.gps || self.constellation.galileo,
            "constellation must enable gps or galileo",
        );
        check(
            self.noise.sigma_pseudorange_km >= 0.0 && self.noise.sigma_carrier_km >= 0.0,
            "noise sigmas must be non-negative",
        );
        let a = self.assumed_noise();
        check(
            a.sigma_pseudorange_km > 0.0 && a.sigma_carrier_km > 0.0,
            "filter_noise sigmas must be positive",
        );
        check(self.iono.zenith_delay_km >= 0.0, "iono.zenith_delay_km must be non-negative");
        check(self.process_noise.velocity > 0.0, "process_noise.velocity must be positive");
        check(self.process_noise.clock > 0.0, "process_noise.clock must be positive");
        v
    }
}

/// Truth and measurements shared by every filter of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct LeoScenario {
    pub times: Vec<f64>,
    pub truth: Vec<LeoState>,
    pub measurements: Vec<Vec<GnssMeasurement>>,
}

/// Propagates the truth orbit (full zonal field, linear clock) and simulates
/// ranges at every epoch.
pub fn simulate_leo_scenario(cfg: &LeoConfig, rng: &mut RunRng) -> Result<LeoScenario> {
    let sats = build_constellation(&cfg.constellation);
    let clock = cfg.truth_clock;
    let field = |x: &DVector<f64>, _t: f64| -> Result<DVector<f64>> {
        let d = leo_derivatives(x.as_slice(), &cfg.gravity, f64::INFINITY);
        Ok(DVector::from_row_slice(&d))
    };
    let mut x = cfg.initial_truth().to_vector();
    let mut scenario = LeoScenario {
        times: Vec::with_capacity(cfg.epochs),
        truth: Vec::with_capacity(cfg.epochs),
        measurements: Vec::with_capacity(cfg.epochs),
    };
    for k in 0..cfg.epochs {
        let t = k as f64 * cfg.interval_s;
        if k > 0 {
            x = propagate(&field, &x, t - cfg.interval_s, t, cfg.substep_s)?;
        }
        let mut state = LeoState::from_slice(x.as_slice());
        state.clock_bias = clock.bias_s + clock.rate * t;
        state.clock_rate = clock.rate;
        let ms = simulate_measurements(
            &state,
            t,
            &sats,
            cfg.gravity.mu_km3_s2,
            &cfg.iono,
            &cfg.noise,
            &cfg.mask,
            rng,
        )?;
        scenario.times.push(t);
        scenario.truth.push(state);
        scenario.measurements.push(ms);
    }
    Ok(scenario)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeoEpoch {
    pub t: f64,
    pub estimate: LeoState,
    /// Estimate minus truth, ECI km.
    pub position_error: [f64; 3],
    pub clock_error_s: f64,
    pub nis: f64,
    pub measurement_dim: usize,
    pub elapsed_ns: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeoRun {
    pub kind: FilterKind,
    /// Filter epochs, starting with the first update after initialization.
    pub epochs: Vec<LeoEpoch>,
}

impl LeoRun {
    /// 3-D position RMS over the epochs after the first `skip`.
    pub fn position_rms(&self, skip: usize) -> f64 {
        let tail = &self.epochs[skip.min(self.epochs.len())..];
        let sum: f64 = tail.iter().map(|e| Vector3::from(e.position_error).norm_squared()).sum();
        (sum / tail.len() as f64).sqrt()
    }

    /// Mean 3-D position error norm over all epochs.
    pub fn time_avg_position_error(&self) -> f64 {
        let sum: f64 = self.epochs.iter().map(|e| Vector3::from(e.position_error).norm()).sum();
        sum / self.epochs.len() as f64
    }
}

fn lsq_epoch(ms: &[GnssMeasurement], pipeline: Pipeline, noise: &GnssNoise) -> Result<LsqSolution> {
    let sats: Vec<_> = ms.iter().map(|m| (m.sat_position(), m.sat_clock_bias_s)).collect();
    let (ranges, sigma): (Vec<f64>, f64) = match pipeline {
        Pipeline::PseudorangeOnly => (ms.iter().map(|m| m.pseudorange_km).collect(), noise.sigma_pseudorange_km),
        Pipeline::Graphic | Pipeline::Raw => (ms.iter().map(graphic_combine).collect(), noise.graphic_sigma()),
    };
    least_squares_init(&ranges, &sats, sigma)
}

/// Initial estimate at the third epoch from three point solutions; velocity
/// and clock rate come from a second-order backward difference.
fn initialize(cfg: &LeoConfig, scenario: &LeoScenario) -> Result<StateEstimate> {
    let noise = cfg.assumed_noise();
    let sols = (0..3)
        .map(|k| lsq_epoch(&scenario.measurements[k], cfg.pipeline, &noise))
        .collect::<Result<Vec<_>>>()?;
    let dt = cfg.interval_s;
    // x0 = L [s0; s1; s2] with s_k = (position, clock bias).
    let mut l = DMatrix::zeros(STATE_DIM, 12);
    let diff = [1.0 / (2.0 * dt), -4.0 / (2.0 * dt), 3.0 / (2.0 * dt)];
    for j in 0..4 {
        let (value_row, rate_row) = if j < 3 { (j, 3 + j) } else { (6, 7) };
        l[(value_row, 8 + j)] = 1.0;
        for (k, w) in diff.iter().enumerate() {
            l[(rate_row, 4 * k + j)] = *w;
        }
    }
    let mut stacked = DVector::zeros(12);
    let mut block = DMatrix::zeros(12, 12);
    for (k, s) in sols.iter().enumerate() {
        stacked.rows_mut(4 * k, 3).copy_from(&s.position);
        stacked[4 * k + 3] = s.clock_bias_s;
        block.view_mut((4 * k, 4 * k), (4, 4)).copy_from(&s.covariance);
    }
    let mean = &l * stacked;
    let mut cov = &l * block * l.transpose();
    crate::numkit::symmetrize(&mut cov);
    StateEstimate::new(mean, cov, scenario.times[2])
}

/// Orbit determination with any of the four filters over a shared scenario.
pub fn run_leo_filter(kind: FilterKind, cfg: &LeoConfig, scenario: &LeoScenario) -> Result<LeoRun> {
    if scenario.times.len() < 4 {
        return Err(Error::InvalidArgument("scenario needs at least 4 epochs".into()));
    }
    let dynamics = LeoDynamics::new(
        cfg.gravity,
        cfg.tau_clock_s,
        cfg.process_noise.velocity,
        cfg.process_noise.clock,
    );
    let settings = cfg.settings();
    let noise = cfg.assumed_noise();
    let mut est = initialize(cfg, scenario).map_err(|e| e.at(scenario.times[2]))?;
    let mut epochs = Vec::with_capacity(scenario.times.len() - 3);
    for k in 3..scenario.times.len() {
        let t = scenario.times[k];
        let (model, z) = GnssMeasurementModel::new(&scenario.measurements[k], cfg.pipeline, &noise);
        let out = filter_step(kind, &dynamics, &model, &est, &z, t - est.epoch, &settings).map_err(|e| e.at(t))?;
        let estimate = LeoState::from_slice(out.estimate.mean.as_slice());
        let truth = &scenario.truth[k];
        epochs.push(LeoEpoch {
            t,
            estimate,
            position_error: (estimate.position() - truth.position()).into(),
            clock_error_s: estimate.clock_bias - truth.clock_bias,
            nis: out.nis,
            measurement_dim: z.len(),
            elapsed_ns: out.elapsed_ns,
        });
        est = out.estimate;
    }
    Ok(LeoRun { kind, epochs })
}

pub fn run_leo_ekf(cfg: &LeoConfig, scenario: &LeoScenario) -> Result<LeoRun> {
    run_leo_filter(FilterKind::Ekf, cfg, scenario)
}
