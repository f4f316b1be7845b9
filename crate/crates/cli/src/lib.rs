//! Command-line front end: flag and config parsing, the six pipelines, and
//! deterministic JSON/CSV output.

pub mod commands;
pub mod config;
pub mod output;

use std::fmt;
use std::fs;
use std::io::Write;

use clap::Parser;

use crate::config::{Cli, Format, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_VALIDATION, message: msg.into() }
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_NUMERIC, message: msg.into() }
    }

    pub fn from_core(e: sigmak_core::Error) -> Self {
        if e.is_validation() {
            Self::validation(e.to_string())
        } else {
            Self::numeric(e.to_string())
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// Parses `args` (program name first), runs the pipeline and writes its
/// output. Returns the process exit code; diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let _ = stderr.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.code
        }
    }
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = RunConfig::from_cli(cli)?;
    log::info!("running {}", cfg.command.name());
    let report = commands::dispatch(&cfg)?;
    let bytes = match cfg.format {
        Format::Json => output::to_json(&report.json),
        Format::Csv => report.table.to_csv(),
    };
    match &cfg.out {
        Some(path) => {
            fs::write(path, &bytes).map_err(|e| CliError::numeric(format!("cannot write {}: {e}", path.display())))?;
            if let Some(summary) = &report.summary {
                stdout.write_all(summary.as_bytes()).map_err(|e| CliError::numeric(e.to_string()))?;
            }
        }
        None => stdout.write_all(&bytes).map_err(|e| CliError::numeric(e.to_string()))?,
    }
    if report.passed {
        Ok(EXIT_OK)
    } else {
        log::info!("verification failed");
        Ok(EXIT_VERIFICATION)
    }
}
