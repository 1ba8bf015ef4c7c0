//! Coefficient realizations, phase masks and Monte Carlo campaigns.

mod comparison;
mod mask;
mod monte_carlo;
mod pgm;
mod random_field;

use std::path::PathBuf;

use thiserror::Error;

use crate::grid::{GridError, SolveError};
use crate::tensor::TensorError;

pub use comparison::{transient_comparison, ComparisonSettings, InitialCondition, TransientComparison};
pub use mask::{ingest_mask, synth_layered_mask, Phase, PhaseMask, SynthLayerSpec};
pub use monte_carlo::{monte_carlo, monte_carlo_with_threads, McStatistics, TrialResult, CSV_COLUMNS};
pub use pgm::{parse_pgm, read_mask, write_pgm, MaskReadOptions, PgmImage};
pub use random_field::{build_random_field, geometric_mean_reference, McConfig};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("trial {index} failed: {source}")]
    Trial {
        index: usize,
        #[source]
        source: SolveError,
    },
    #[error("malformed PGM at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("thread pool: {0}")]
    ThreadPool(String),
}
