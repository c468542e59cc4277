use std::path::PathBuf;

use fastukf::FilterKind;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}", parse_message(.line, .column, .field, .message))]
    Parse {
        line: Option<usize>,
        column: Option<usize>,
        field: Option<String>,
        message: String,
    },
    #[error("invalid configuration: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("run {run}, filter {filter}{}: {source}", .epoch.map(|t| format!(", t = {t} s")).unwrap_or_default())]
    Filter {
        run: u64,
        filter: FilterKind,
        epoch: Option<f64>,
        #[source]
        source: fastukf::Error,
    },
    #[error("run {run}: scenario setup failed: {source}")]
    Scenario {
        run: u64,
        #[source]
        source: fastukf::Error,
    },
    #[error("no records to summarize")]
    EmptyInput,
}

fn parse_message(line: &Option<usize>, column: &Option<usize>, field: &Option<String>, message: &str) -> String {
    let mut s = String::from("config parse error");
    if let Some(l) = line {
        s += &format!(" at line {l}");
        if let Some(c) = column {
            s += &format!(", column {c}");
        }
    }
    if let Some(f) = field {
        s += &format!(" in field `{f}`");
    }
    s + ": " + message
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable category for the JSON error line.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Validation(_) => "validation",
            CliError::Io { .. } => "io",
            CliError::Csv(_) => "csv",
            CliError::Filter { .. } => "filter",
            CliError::Scenario { .. } => "scenario",
            CliError::EmptyInput => "empty_input",
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
