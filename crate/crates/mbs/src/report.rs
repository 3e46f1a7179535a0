//! Machine-readable command reports and the exit-code contract.
//!
//! Every CLI command can emit a versioned JSON report: a stable envelope
//! `{version, command, status, payload}` whose payload shape depends on the
//! command. Status and exit code carry the same information, so scripted
//! callers may branch on either.

use serde::{Deserialize, Serialize};

/// Version of the report envelope.
pub const REPORT_VERSION: u64 = 1;

/// Outcome class of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Command completed and all checks it performed passed.
    Ok,
    /// Input data failed validation or could not be compiled.
    ValidationError,
    /// Assembled boundary maps do not square to zero.
    ChainError,
    /// At least one of the inequalities fails.
    InequalityViolation,
}

impl Status {
    /// The process exit code that corresponds to this status.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::ValidationError => 1,
            Status::ChainError => 2,
            Status::InequalityViolation => 3,
        }
    }
}

/// Exit code for input/output and other environment failures, outside the
/// status taxonomy above.
pub const EXIT_IO: i32 = 4;

/// Versioned report envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: u64,
    pub command: String,
    pub status: Status,
    pub payload: serde_json::Value,
}

impl Report {
    pub fn new(command: &str, status: Status, payload: serde_json::Value) -> Self {
        Report { version: REPORT_VERSION, command: command.to_owned(), status, payload }
    }

    /// Pretty JSON rendering with a trailing newline; object keys inside
    /// the payload come from `serde_json::Map`s built over sorted maps, so
    /// rendering is deterministic.
    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("report envelopes always serialize");
        text.push('\n');
        text
    }
}
