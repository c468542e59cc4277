use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fastukf::reentry::NoisePreset;
use fastukf::FilterKind;
use fastukf_cli::{
    emit_records_csv, emit_summary_csv, load_config, monte_carlo, render_config, summarize, CliError,
    Scenario, ScenarioConfig,
};

#[derive(Parser)]
#[command(version, about = "Monte Carlo accuracy/timing comparison of EKF, UKF, SPUKF and ESPUKF")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ballistic re-entry tracked by a range/elevation radar.
    Reentry(RunArgs),
    /// LEO orbit determination from GPS + Galileo ranges.
    Leo(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML config; missing keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated subset of ekf,ukf,spukf,espukf.
    #[arg(long, value_delimiter = ',')]
    filters: Option<Vec<FilterKind>>,
    /// Output directory (default: `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    noise_preset: Option<NoisePreset>,
    /// Run Monte Carlo iterations serially for cleaner timings.
    #[arg(long)]
    serial: bool,
}

fn resolve(scenario: Scenario, args: RunArgs) -> Result<ScenarioConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => load_config(path)?,
        None => ScenarioConfig::default(),
    };
    cfg.scenario = scenario;
    if let Some(r) = args.runs {
        cfg.runs = r;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(f) = args.filters {
        cfg.filters = f;
    }
    if let Some(p) = args.noise_preset {
        cfg.reentry.noise_preset = p;
    }
    if args.serial {
        cfg.serial = true;
    }
    if let Some(out) = args.out {
        cfg.output = Some(out);
    }
    cfg.output.get_or_insert_with(|| PathBuf::from("out"));
    let problems = cfg.validate();
    if !problems.is_empty() {
        return Err(CliError::Validation(problems));
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<usize, CliError> {
    let cfg = match cli.command {
        Command::Reentry(a) => resolve(Scenario::Reentry, a)?,
        Command::Leo(a) => resolve(Scenario::Leo, a)?,
    };
    let dir = cfg.output.clone().expect("resolved above");
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let echo = dir.join("config.toml");
    std::fs::write(&echo, render_config(&cfg)).map_err(|e| CliError::io(&echo, e))?;

    let mc = monte_carlo(&cfg);
    for f in &mc.failures {
        eprintln!("{}", serde_json::json!({ "warning": "run_failed", "run_id": f.run_id, "message": f.message }));
    }
    emit_records_csv(&mc.records, &dir.join("records.csv"))?;
    let stats = summarize(&mc.records, cfg.scenario.position_dims())?;
    emit_summary_csv(&stats, &dir.join("summary.csv"))?;
    for s in &stats {
        println!(
            "{:<7} time-avg error {:.6e}  mean step {:>10.0} ns  median {:>10.0} ns  runs {}",
            s.filter, s.time_avg_err, s.mean_step_ns, s.median_step_ns, s.runs
        );
    }
    Ok(mc.failures.len())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let message = e.to_string();
            let first = message.lines().next().unwrap_or_default().trim_start_matches("error: ");
            eprintln!("{}", serde_json::json!({ "error": "usage", "message": first }));
            return ExitCode::FAILURE;
        }
    };
    match run(cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(2),
        Err(e) => {
            eprintln!("{}", serde_json::json!({ "error": e.kind(), "message": e.to_string() }));
            ExitCode::FAILURE
        }
    }
}
