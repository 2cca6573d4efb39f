//! Result rows, error classification and exit codes.

use std::fmt;

use cfl_core::Error;
use serde::{Deserialize, Serialize};

pub const CSV_HEADER: [&str; 12] = [
    "instance",
    "n",
    "k",
    "seed",
    "method",
    "backend",
    "transform_ms",
    "inference_ms",
    "size",
    "tw_estimate",
    "probability",
    "status",
];

/// One execution of one query by one method. Field names are the CSV
/// columns and the JSON keys.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub instance: String,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub method: String,
    pub backend: String,
    pub transform_ms: f64,
    pub inference_ms: f64,
    pub size: usize,
    pub tw_estimate: usize,
    pub probability: Option<f64>,
    /// `ok`, `timeout` or `error:<exit code>`.
    pub status: String,
}

/// A failed command: the message and the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn code(&self) -> u8 {
        self.code
    }

    /// An error in the intervention flags or directives.
    pub fn intervention(e: Error) -> Self {
        let code = match exit_code(&e) {
            2 => 3,
            c => c,
        };
        CliError::new(code, e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::new(exit_code(&e), e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(1, e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::new(1, e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::new(2, e.to_string())
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::EmptyIntervention | Error::NameCollision(_) => 3,
        Error::ZeroEvidence { .. } => 4,
        Error::EvidenceOnDescendant { .. } => 5,
        Error::Guard { .. } | Error::NodeCap(_) | Error::Timeout => 6,
        _ => 2,
    }
}

pub fn status_of(e: &Error) -> String {
    match e {
        Error::Timeout => "timeout".into(),
        e => format!("error:{}", exit_code(e)),
    }
}

pub fn millis(d: std::time::Duration) -> f64 {
    d.as_secs_f64() * 1e3
}
