//! Library side of the `nsyn` command: configuration handling and the
//! subcommands, kept here so they can be tested without a process.

pub mod commands;
pub mod config;

use std::fmt;

use nsyn::{SynthError, Weight};

/// Exit status for a successful run.
pub const EXIT_OK: u8 = 0;
/// Bad arguments, unreadable files, malformed input.
pub const EXIT_USAGE: u8 = 1;
/// Construction finished but no program satisfies the request.
pub const EXIT_NO_PROGRAM: u8 = 2;
pub const EXIT_TIMEOUT: u8 = 3;

/// A failed command: message plus process exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::usage(message)
    }
}

impl From<SynthError> for Failure {
    fn from(e: SynthError) -> Self {
        let code = if e.is_timeout() {
            EXIT_TIMEOUT
        } else if e.is_no_program() {
            EXIT_NO_PROGRAM
        } else {
            EXIT_USAGE
        };
        Failure { code, message: e.to_string() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

/// Weights in reports: plain numbers, `Infinity` for undefined outputs.
pub fn show_weight(w: Weight) -> String {
    match w {
        Weight::Finite(x) => format!("{x}"),
        Weight::Infinity => "Infinity".into(),
    }
}

pub fn weight_json(w: Weight) -> serde_json::Value {
    match w {
        Weight::Finite(x) => serde_json::json!(x),
        Weight::Infinity => serde_json::json!("Infinity"),
    }
}
