//! Monte Carlo harness comparing filter accuracy against per-step processing
//! time on the re-entry and LEO scenarios.

pub mod config;
pub mod error;
pub mod harness;
pub mod output;
pub mod summary;

pub use config::{load_config, parse_config, render_config, Scenario, ScenarioConfig};
pub use error::{CliError, Result};
pub use harness::{monte_carlo, run_once, MonteCarloOutput, RunFailure, RunRecord};
pub use output::{emit_records_csv, emit_summary_csv, read_records_csv, write_records, write_summary};
pub use summary::{median, run_time_averages, summarize, SummaryStats};
