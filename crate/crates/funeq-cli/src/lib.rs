//! Command-line front door for the functional-equation workbench.
//!
//! The binary (`funeq`) loads equation specs from TOML files, runs the
//! certification / solving / approximation / oracle / benchmark workflows
//! from [`funeq_core`], prints a structured [`report::RunReport`] to stdout,
//! and writes plot-ready CSV series.
//!
//! Exit codes: 0 success (and `check` of a guaranteed spec), 1 invalid
//! input, 2 valid-but-unguaranteed (`check` only), 3 runtime numerical
//! failure.

pub mod bench;
pub mod commands;
pub mod csvout;
pub mod parallel;
pub mod report;
pub mod specfile;

/// Error carrying the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub exit: u8,
    pub message: String,
}

impl CliError {
    /// Invalid input: unreadable or malformed files, bad parameters,
    /// violated hypotheses (exit 1).
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            exit: 1,
            message: message.into(),
        }
    }

    /// Runtime numerical failure (exit 3).
    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            exit: 3,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}
