//! Exit statuses, report envelopes and number formatting shared by every command.

use std::path::Path;

use serde::Serialize;
use thiserror::Error;

pub const VERSION: &str = concat!("v", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExitStatus {
    Pass = 0,
    InternalMismatch = 1,
    ClaimViolation = 2,
    Usage = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    /// The more severe of two statuses.
    pub fn worst(self, other: ExitStatus) -> ExitStatus {
        let rank = |s: ExitStatus| match s {
            ExitStatus::Pass => 0,
            ExitStatus::ClaimViolation => 1,
            ExitStatus::InternalMismatch => 2,
            ExitStatus::Usage => 3,
        };
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] locc_core::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn status(&self) -> ExitStatus {
        use locc_core::Error as E;
        match self {
            CliError::Usage(_) => ExitStatus::Usage,
            CliError::Core(
                E::InvalidArgument(_)
                | E::InvalidState(_)
                | E::InvalidDimension(_)
                | E::DimensionCap { .. }
                | E::NotNormalized(_)
                | E::UnknownLabel(_)
                | E::PremiseViolated(_),
            ) => ExitStatus::Usage,
            _ => ExitStatus::InternalMismatch,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Top-level object of every JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct ReportEnvelope<P: Serialize, R: Serialize> {
    pub command: String,
    pub parameters: P,
    pub version: String,
    pub seed: u64,
    pub results: R,
}

impl<P: Serialize, R: Serialize> ReportEnvelope<P, R> {
    pub fn new(command: &str, parameters: P, seed: u64, results: R) -> Self {
        Self {
            command: command.to_string(),
            parameters,
            version: VERSION.to_string(),
            seed,
            results,
        }
    }

    pub fn to_json(&self) -> CliResult<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub body: String,
    pub status: ExitStatus,
    pub warnings: Vec<String>,
}

impl CommandOutput {
    pub fn new(body: String, status: ExitStatus) -> Self {
        Self {
            body,
            status,
            warnings: Vec::new(),
        }
    }
}

/// 17 significant digits, round-trippable.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> CliResult<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn write_output(out: Option<&Path>, body: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, body).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}
