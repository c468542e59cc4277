use std::path::{Path, PathBuf};

use fastukf::leonav::LeoConfig;
use fastukf::reentry::{
    NoisePreset, RadarSite, ReentryState, VehicleParams, DEFAULT_MAX_DURATION,
};
use fastukf::FilterKind;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    #[default]
    Reentry,
    Leo,
    /// Two-state linear oscillator, used to cross-check the filters.
    Linear,
}

impl Scenario {
    /// Number of leading error components that are positions.
    pub fn position_dims(self) -> usize {
        match self {
            Scenario::Reentry | Scenario::Linear => 2,
            Scenario::Leo => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub filters: Vec<FilterKind>,
    /// 64-bit master seed; run `i` draws from stream `i`.
    pub seed: u64,
    pub runs: usize,
    /// Run Monte Carlo iterations one after another (less timing noise).
    pub serial: bool,
    /// Run and discard one iteration before the timed runs.
    pub warmup: bool,
    pub output: Option<PathBuf>,
    pub reentry: ReentryConfig,
    pub leo: LeoConfig,
    pub linear: LinearConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::Reentry,
            filters: FilterKind::ALL.to_vec(),
            seed: 42,
            runs: 20,
            serial: false,
            warmup: true,
            output: None,
            reentry: ReentryConfig::default(),
            leo: LeoConfig::default(),
            linear: LinearConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReentryConfig {
    pub vehicle: VehicleParams,
    pub radar: RadarSite,
    pub truth_initial: ReentryState,
    pub estimate_initial: ReentryState,
    /// Diagonal of P(0).
    pub initial_covariance: [f64; 5],
    /// Diagonal of Q.
    pub process_noise: [f64; 5],
    pub noise_preset: NoisePreset,
    pub kappa: Option<f64>,
    pub substep_s: f64,
    pub rate_hz: f64,
    pub duration_s: f64,
}

impl Default for ReentryConfig {
    fn default() -> Self {
        Self {
            vehicle: VehicleParams::default(),
            radar: RadarSite::default(),
            truth_initial: ReentryState::reference_initial(),
            estimate_initial: ReentryState::reference_estimate(),
            initial_covariance: [6.0, 6.0, 0.1, 0.1, 0.1],
            process_noise: [1e-15; 5],
            noise_preset: NoisePreset::Sim50m,
            kappa: None,
            substep_s: 0.1,
            rate_hz: 1.0,
            duration_s: DEFAULT_MAX_DURATION,
        }
    }
}

impl ReentryConfig {
    /// Truth-trajectory steps between measurements.
    pub fn stride(&self) -> usize {
        (1.0 / (self.rate_hz * self.substep_s)).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinearConfig {
    pub a: [[f64; 2]; 2],
    pub h: [f64; 2],
    /// Diagonal of Q; all zeros gives a noiseless model.
    pub process_noise: [f64; 2],
    pub measurement_variance: f64,
    pub truth_initial: [f64; 2],
    pub estimate_initial: [f64; 2],
    pub initial_covariance: [f64; 2],
    pub interval_s: f64,
    pub substep_s: f64,
    pub steps: usize,
}

impl Default for LinearConfig {
    fn default() -> Self {
        Self {
            a: [[0.0, 1.0], [-0.2, -0.05]],
            h: [1.0, 0.0],
            process_noise: [0.0, 0.0],
            measurement_variance: 0.01,
            truth_initial: [1.0, 0.0],
            estimate_initial: [0.8, 0.1],
            initial_covariance: [0.5, 0.5],
            interval_s: 1.0,
            substep_s: 0.01,
            steps: 100,
        }
    }
}

impl ScenarioConfig {
    /// Every violated constraint, one message each.
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.filters.is_empty() {
            v.push("filters must not be empty".to_string());
        }
        if self.runs == 0 {
            v.push("runs must be at least 1".to_string());
        }
        match self.scenario {
            Scenario::Reentry => validate_reentry(&self.reentry, &mut v),
            Scenario::Leo => v.extend(self.leo.validate().into_iter().map(|m| format!("leo.{m}"))),
            Scenario::Linear => validate_linear(&self.linear, &mut v),
        }
        v
    }
}

fn positive(v: &mut Vec<String>, name: &str, x: f64) {
    if !(x > 0.0 && x.is_finite()) {
        v.push(format!("{name} must be positive and finite (got {x})"));
    }
}

fn validate_reentry(r: &ReentryConfig, v: &mut Vec<String>) {
    v.extend(r.vehicle.validate().into_iter().map(|m| format!("reentry.{m}")));
    positive(v, "reentry.rate_hz", r.rate_hz);
    positive(v, "reentry.substep_s", r.substep_s);
    positive(v, "reentry.duration_s", r.duration_s);
    if r.rate_hz > 0.0 && r.substep_s > 0.0 {
        let ratio = 1.0 / (r.rate_hz * r.substep_s);
        if ratio < 0.5 || (ratio - ratio.round()).abs() > 1e-9 * ratio {
            v.push("reentry: measurement interval must be a whole number of substeps".to_string());
        }
    }
    for (k, p) in r.initial_covariance.iter().enumerate() {
        positive(v, &format!("reentry.initial_covariance[{k}]"), *p);
    }
    for (k, q) in r.process_noise.iter().enumerate() {
        positive(v, &format!("reentry.process_noise[{k}]"), *q);
    }
    if r.truth_initial.h <= 0.0 {
        v.push("reentry.truth_initial.h must be positive".to_string());
    }
}

fn validate_linear(l: &LinearConfig, v: &mut Vec<String>) {
    positive(v, "linear.interval_s", l.interval_s);
    positive(v, "linear.substep_s", l.substep_s);
    positive(v, "linear.measurement_variance", l.measurement_variance);
    for (k, p) in l.initial_covariance.iter().enumerate() {
        positive(v, &format!("linear.initial_covariance[{k}]"), *p);
    }
    if l.process_noise.iter().any(|q| !(*q >= 0.0)) {
        v.push("linear.process_noise entries must be non-negative".to_string());
    }
    let zeros = l.process_noise.iter().filter(|q| **q == 0.0).count();
    if zeros == 1 {
        v.push("linear.process_noise must be all zero or all positive".to_string());
    }
    if l.steps == 0 {
        v.push("linear.steps must be at least 1".to_string());
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

/// Parses and validates a config; missing keys take their defaults.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let de = toml::Deserializer::parse(text).map_err(|e| parse_error(text, None, &e))?;
    let cfg: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let field = (path != ".").then_some(path);
        parse_error(text, field, e.inner())
    })?;
    let problems = cfg.validate();
    if problems.is_empty() {
        Ok(cfg)
    } else {
        Err(CliError::Validation(problems))
    }
}

fn parse_error(text: &str, field: Option<String>, e: &toml::de::Error) -> CliError {
    let (line, column) = match e.span() {
        Some(span) => {
            let (l, c) = line_col(text, span.start);
            (Some(l), Some(c))
        }
        None => (None, None),
    };
    CliError::Parse {
        line,
        column,
        field,
        message: e.message().trim().to_string(),
    }
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text)
}

/// The fully resolved config as TOML.
pub fn render_config(cfg: &ScenarioConfig) -> String {
    toml::to_string_pretty(cfg).expect("config always serializes")
}
