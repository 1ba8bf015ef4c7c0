//! Diffusion-tensor algebra, rotation sampling and analytic homogenization.

mod layered;
mod partition;
mod rotation;
mod seed;
mod sym;

use thiserror::Error;

pub use layered::{harmonic_mean_profile, layered_effective_tensor, LayeredMedium};
pub use partition::{transform_partition, SingleFieldCoefficients, TwoPhaseCoefficients};
pub use rotation::{
    rotation_matrix, sample_rotation_2d, sample_rotation_3d, Rotation, Rotation2, Rotation3,
};
pub use seed::trial_seed;
pub use sym::{rotate_tensor, Matrix, SymTensor};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("matrix must be 2x2 or 3x3 (got {0} rows or ragged rows)")]
    Shape(usize),
    #[error("entry ({i},{j}) differs from its transpose")]
    NotSymmetric { i: usize, j: usize },
    #[error("tensor is not positive definite")]
    NotPositiveDefinite,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("angle {name} = {value} outside its range")]
    AngleRange { name: &'static str, value: f64 },
    #[error("scale factor must be positive and finite, got {0}")]
    NonPositiveScale(f64),
    #[error("partition coefficient must be positive, got {0}")]
    PartitionCoefficient(f64),
    #[error("layered homogenization requires diagonal phase tensors")]
    NonDiagonalPhase,
    #[error("invalid layered medium: {0}")]
    InvalidMedium(&'static str),
    #[error("harmonic mean of an empty profile")]
    EmptyProfile,
    #[error("profile segment {index} has non-positive length or diffusivity")]
    InvalidSegment { index: usize },
    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(&'static str),
}
