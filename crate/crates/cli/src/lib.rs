//! Command-line front end for `ortho-lens`: table ingestion, near-duplicate
//! filtering, the analysis commands and their JSON reports.

pub mod args;
pub mod commands;
pub mod error;
pub mod filter;
pub mod format;
pub mod report;

use std::io::Write;

pub use args::Cli;
pub use error::{CliError, CliResult};

/// Runs one parsed invocation, writing the report to `--output` or stdout.
pub fn run(cli: &Cli) -> CliResult<()> {
    let (json, out) = commands::execute(&cli.command)?;
    match &out.output {
        Some(path) => std::fs::write(path, json).map_err(|e| CliError::io(path, e)),
        None => std::io::stdout()
            .lock()
            .write_all(json.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}
