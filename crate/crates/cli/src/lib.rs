//! Batch front end: problem files in, structured reports out.

pub mod error;
pub mod problem;
pub mod report;
pub mod tasks;
pub mod workspace;

use std::path::Path;

pub use error::CliError;
pub use report::Report;
pub use tasks::RunOptions;

/// Parses, resolves and runs a problem given as text.
pub fn run_source(name: &str, src: &str, opts: &RunOptions) -> Result<Report, CliError> {
    let file = problem::parse_problem(src).map_err(CliError::Input)?;
    let ws = workspace::build(&file)?;
    let planned = tasks::plan(&file, &ws, opts)?;
    Ok(tasks::run(name, &planned, opts))
}

pub fn run_file(path: &Path, opts: &RunOptions) -> Result<Report, CliError> {
    let src = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
    run_source(&name, &src, opts)
}
