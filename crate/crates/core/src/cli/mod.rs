//! Command-line front end of the `effdiff` binary.
//!
//! [`parse_config`] turns arguments and an optional `key = value` file into a
//! validated [`RunConfig`]; [`run`] dispatches it to one of the subcommands
//! `layered`, `estimate`, `cellprob`, `mc2d`, `mc3d` and `transient`, prints a
//! summary and, with `--out`, writes a CSV artifact that starts with the
//! resolved configuration as `# key=value` lines.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;

use thiserror::Error;

use crate::experiments::ExperimentError;
use crate::grid::SolveError;
use crate::tensor::TensorError;

pub use commands::run;
pub use config::{parse_config, usage, Command, Key, Kind, Need, RunConfig, Value};

#[derive(Debug, Error)]
pub enum CliError {
    /// Not a failure: the requested usage text.
    #[error("{0}")]
    Help(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        CliError::Experiment(e.into())
    }
}

impl From<TensorError> for CliError {
    fn from(e: TensorError) -> Self {
        CliError::Experiment(e.into())
    }
}

impl From<crate::grid::GridError> for CliError {
    fn from(e: crate::grid::GridError) -> Self {
        CliError::Experiment(e.into())
    }
}

/// Parses and runs one invocation, printing the summary to `stdout` and
/// diagnostics to `stderr`. Returns the process exit status: 0 on success and
/// for help, 2 for usage errors, 1 for any other failure.
pub fn main_with_args<S: AsRef<str>>(args: &[S], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let outcome = parse_config(args).and_then(|config| run(&config, stdout, stderr));
    match outcome {
        Ok(()) => 0,
        Err(CliError::Help(text)) => {
            let _ = write!(stdout, "{text}");
            0
        }
        Err(e @ CliError::Usage(_)) => {
            let _ = writeln!(stderr, "effdiff: {e}\n\n{}", usage(None));
            2
        }
        Err(e) => {
            let _ = writeln!(stderr, "effdiff: error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                let _ = writeln!(stderr, "  caused by: {s}");
                source = s.source();
            }
            1
        }
    }
}
