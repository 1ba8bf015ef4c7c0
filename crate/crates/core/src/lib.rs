//! Effective diffusivities for layered and randomly oriented anisotropic media.
//!
//! The crate is organised bottom-up:
//!
//! * [`tensor`] holds diffusion-tensor algebra, Haar-uniform rotation sampling,
//!   closed-form layered homogenization and the partition-coefficient transform.
//! * [`grid`] is a multilinear finite element solver on uniform tensor-product
//!   grids: stationary estimation problems, periodic cell problems and
//!   backward-Euler transients.
//! * [`experiments`] builds random and layered coefficient realizations, reads
//!   phase masks, and runs seeded Monte Carlo campaigns.
//! * [`cli`] is the configuration parser and dispatcher behind the `effdiff`
//!   binary.

pub mod cli;
pub mod experiments;
pub mod grid;
pub mod tensor;

pub use experiments::{
    build_random_field, geometric_mean_reference, ingest_mask, monte_carlo, read_mask,
    synth_layered_mask, transient_comparison, McConfig, McStatistics, PhaseMask, SynthLayerSpec,
};


pub use grid::{
    boundary_average, estimate_effective_diffusivity, solve_cell_problem, solve_stationary_bvp,
    solve_transient, EstimationBc, Face, FluxHistory, ScalarField, SolverConfig, StructuredGrid,
    TensorField,
};
pub use tensor::{
    harmonic_mean_profile, layered_effective_tensor, rotate_tensor, sample_rotation_2d,
    sample_rotation_3d, transform_partition, trial_seed, LayeredMedium, Rotation, Rotation2,
    Rotation3, SymTensor,
};
