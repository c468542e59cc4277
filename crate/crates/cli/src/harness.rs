use fastukf::estimators::linear::{LinearDynamics, LinearMeasurement};
use fastukf::leonav::{run_leo_filter, simulate_leo_scenario};
use fastukf::numkit::mat_exp;
use fastukf::reentry::{
    generate_reference_trajectory, radar_measure, RadarMeasurement, RadarNoiseSpec, ReentryDynamics,
};
use fastukf::rng::RunRng;
use fastukf::{
    filter_step, DMatrix, DVector, DynamicsModel, FilterKind, FilterSettings, MeasurementModel, StateEstimate,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{LinearConfig, ReentryConfig, Scenario, ScenarioConfig};
use crate::error::{CliError, Result};

/// Error of one filter at one epoch of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub run_id: u64,
    pub filter: FilterKind,
    pub t: f64,
    /// Truth minus estimate, one entry per state component.
    pub errors: Vec<f64>,
    pub step_time_ns: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunFailure {
    pub run_id: u64,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct MonteCarloOutput {
    /// Records of every completed run, sorted by (run, filter, epoch).
    pub records: Vec<RunRecord>,
    pub failures: Vec<RunFailure>,
}

/// Measurement epochs shared by every filter of a run.
struct Epoch {
    t: f64,
    truth: DVector<f64>,
    z: DVector<f64>,
}

/// One truth trajectory and one noise realization, replayed through every
/// selected filter.
pub fn run_once(cfg: &ScenarioConfig, run_id: u64) -> Result<Vec<RunRecord>> {
    match cfg.scenario {
        Scenario::Reentry => run_reentry(cfg, &cfg.reentry, run_id),
        Scenario::Linear => run_linear(cfg, &cfg.linear, run_id),
        Scenario::Leo => run_leo(cfg, run_id),
    }
}

fn diag(d: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_row_slice(d))
}

fn replay(
    cfg: &ScenarioConfig,
    run_id: u64,
    dynamics: &dyn DynamicsModel,
    measurement: &dyn MeasurementModel,
    initial: &StateEstimate,
    epochs: &[Epoch],
    settings: &FilterSettings,
) -> Result<Vec<RunRecord>> {
    let mut records = Vec::with_capacity(cfg.filters.len() * epochs.len());
    for &filter in &cfg.filters {
        let mut est = initial.clone();
        for e in epochs {
            let out = filter_step(filter, dynamics, measurement, &est, &e.z, e.t - est.epoch, settings)
                .map_err(|source| CliError::Filter {
                    run: run_id,
                    filter,
                    epoch: Some(e.t),
                    source,
                })?;
            records.push(RunRecord {
                run_id,
                filter,
                t: e.t,
                errors: (&e.truth - &out.estimate.mean).iter().copied().collect(),
                step_time_ns: out.elapsed_ns,
            });
            est = out.estimate;
        }
    }
    Ok(records)
}

fn run_reentry(cfg: &ScenarioConfig, r: &ReentryConfig, run_id: u64) -> Result<Vec<RunRecord>> {
    let setup = |source| CliError::Scenario { run: run_id, source };
    let traj = generate_reference_trajectory(&r.truth_initial, &r.vehicle, r.substep_s, r.duration_s).map_err(setup)?;
    let noise = RadarNoiseSpec::from_preset(r.noise_preset, cfg.seed);
    let mut rng = noise.generator(run_id);
    let mut epochs = Vec::new();
    for p in traj.iter().step_by(r.stride()).skip(1) {
        if p.state.h <= 0.0 {
            break;
        }
        let z = radar_measure(&p.state, &r.radar, &r.vehicle, &noise, &mut rng).map_err(|e| setup(e.at(p.t)))?;
        epochs.push(Epoch {
            t: p.t,
            truth: p.state.to_vector(),
            z: DVector::from_row_slice(&z),
        });
    }
    let dynamics = ReentryDynamics::new(r.vehicle, diag(&r.process_noise));
    let measurement = RadarMeasurement::new(r.radar, r.vehicle, &noise);
    let initial = StateEstimate::new(r.estimate_initial.to_vector(), diag(&r.initial_covariance), 0.0).map_err(setup)?;
    let settings = FilterSettings {
        substep: r.substep_s,
        kappa: r.kappa,
    };
    replay(cfg, run_id, &dynamics, &measurement, &initial, &epochs, &settings)
}

fn run_linear(cfg: &ScenarioConfig, l: &LinearConfig, run_id: u64) -> Result<Vec<RunRecord>> {
    let setup = |source| CliError::Scenario { run: run_id, source };
    let a = DMatrix::from_row_slice(2, 2, &[l.a[0][0], l.a[0][1], l.a[1][0], l.a[1][1]]);
    let dynamics = if l.process_noise.iter().all(|q| *q == 0.0) {
        LinearDynamics::noiseless(a.clone())
    } else {
        LinearDynamics::new(a.clone(), diag(&l.process_noise))
    };
    let h = DMatrix::from_row_slice(1, 2, &l.h);
    let measurement = LinearMeasurement::new(h.clone(), DMatrix::from_element(1, 1, l.measurement_variance));
    let phi = mat_exp(&a, l.interval_s);
    let mut rng = RunRng::new(cfg.seed, run_id);
    let mut x = DVector::from_row_slice(&l.truth_initial);
    let mut epochs = Vec::with_capacity(l.steps);
    for k in 1..=l.steps {
        x = &phi * x;
        let z = &h * &x + DVector::from_element(1, rng.gaussian(l.measurement_variance.sqrt()));
        epochs.push(Epoch {
            t: k as f64 * l.interval_s,
            truth: x.clone(),
            z,
        });
    }
    let initial = StateEstimate::new(
        DVector::from_row_slice(&l.estimate_initial),
        diag(&l.initial_covariance),
        0.0,
    )
    .map_err(setup)?;
    let settings = FilterSettings {
        substep: l.substep_s,
        kappa: None,
    };
    replay(cfg, run_id, &dynamics, &measurement, &initial, &epochs, &settings)
}

fn run_leo(cfg: &ScenarioConfig, run_id: u64) -> Result<Vec<RunRecord>> {
    let scenario = simulate_leo_scenario(&cfg.leo, &mut RunRng::new(cfg.seed, run_id))
        .map_err(|source| CliError::Scenario { run: run_id, source })?;
    let mut records = Vec::new();
    for &filter in &cfg.filters {
        let run = run_leo_filter(filter, &cfg.leo, &scenario).map_err(|source| CliError::Filter {
            run: run_id,
            filter,
            epoch: source.epoch(),
            source,
        })?;
        let first = scenario.times.len() - run.epochs.len();
        for (e, truth) in run.epochs.iter().zip(&scenario.truth[first..]) {
            records.push(RunRecord {
                run_id,
                filter,
                t: e.t,
                errors: (truth.to_vector() - e.estimate.to_vector()).iter().copied().collect(),
                step_time_ns: e.elapsed_ns,
            });
        }
    }
    Ok(records)
}

/// Warm-up stream, disjoint from every real run.
const WARMUP_RUN: u64 = u64::MAX;

/// `cfg.runs` independent runs on streams `0..runs` of the master seed.
///
/// A failed run contributes no records; its error is collected and the
/// remaining runs carry on.
pub fn monte_carlo(cfg: &ScenarioConfig) -> MonteCarloOutput {
    if cfg.warmup {
        let _ = run_once(cfg, WARMUP_RUN);
    }
    let ids: Vec<u64> = (0..cfg.runs as u64).collect();
    let results: Vec<(u64, Result<Vec<RunRecord>>)> = if cfg.serial {
        ids.iter().map(|&id| (id, run_once(cfg, id))).collect()
    } else {
        ids.par_iter().map(|&id| (id, run_once(cfg, id))).collect()
    };
    let mut out = MonteCarloOutput::default();
    for (run_id, result) in results {
        match result {
            Ok(records) => out.records.extend(records),
            Err(e) => out.failures.push(RunFailure {
                run_id,
                message: e.to_string(),
            }),
        }
    }
    sort_records(&mut out.records);
    out
}

pub fn sort_records(records: &mut [RunRecord]) {
    records.sort_by(|a, b| {
        (a.run_id, a.filter)
            .cmp(&(b.run_id, b.filter))
            .then(a.t.total_cmp(&b.t))
    });
}
