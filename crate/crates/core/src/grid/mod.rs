//! Multilinear finite elements on uniform tensor-product grids.
//!
//! Coefficients are constant per cell, so material interfaces always lie on
//! element faces. Dirichlet data are imposed strongly by symmetric row/column
//! elimination and Robin data through an exact face mass term, which keeps
//! every assembled system symmetric positive definite (or semi-definite with
//! constant null space for periodic cell problems).

mod assembly;
mod cell;
pub mod sparse;
mod stationary;
mod transient;
mod mesh;

use thiserror::Error;

pub use cell::{solve_cell_problem, CellSolution};
pub use mesh::{ScalarField, StructuredGrid, TensorField};
pub use stationary::{
    boundary_average, boundary_fluxes, estimate_effective_diffusivity, estimate_report,
    solve_stationary_bvp, EstimateReport,
};
pub use transient::{capacity_mass, solve_transient, FluxHistory, TransientRun, TransientSettings};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grids are 2D or 3D, got {0} axes")]
    Dimension(usize),
    #[error("extent along axis {axis} must be positive, got {value}")]
    Extent { axis: usize, value: f64 },
    #[error("axis {axis} needs at least one cell")]
    NoCells { axis: usize },
    #[error("expected {expected} cell values, got {got}")]
    CellCount { expected: usize, got: usize },
    #[error("expected {expected} nodal values, got {got}")]
    NodeCount { expected: usize, got: usize },
    #[error("tensor dimension {tensor} does not match grid dimension {grid}")]
    TensorDimension { grid: usize, tensor: usize },
    #[error("invalid coefficient: {0}")]
    Coefficient(&'static str),
    #[error("invalid boundary data: {0}")]
    Boundary(&'static str),
    #[error("invalid time stepping: {0}")]
    TimeStep(&'static str),
    #[error("field and initial state live on different grids")]
    GridMismatch,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("linear solver stopped after {iterations} iterations at relative residual {relative_residual:e}")]
    NotConverged { iterations: usize, relative_residual: f64 },
    #[error("assembled operator is not positive definite (breakdown at iteration {iteration})")]
    NotPositiveDefinite { iteration: usize },
    #[error("periodic solution drifted off the zero-mean subspace (mean {mean:e})")]
    MeanDrift { mean: f64 },
    #[error("outlet average equals inlet concentration; estimator undefined")]
    DegenerateGradient,
    #[error("time step {step} failed: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<SolveError>,
    },
}

/// Linear-solver controls shared by every solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Stop when `‖r‖ ≤ rel_tol · ‖b‖`.
    pub rel_tol: f64,
    /// `None` means `50 · n^(1/dim)` for `n` unknowns.
    pub max_iter: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-10, max_iter: None }
    }
}

impl SolverConfig {
    pub fn with_tolerance(rel_tol: f64) -> Self {
        Self { rel_tol, ..Self::default() }
    }

    pub fn max_iterations(&self, unknowns: usize, dim: usize) -> usize {
        self.max_iter.unwrap_or_else(|| {
            let per_axis = (unknowns as f64).powf(1.0 / dim as f64).ceil() as usize;
            50 * per_axis.max(1)
        })
    }
}

/// Boundary face of a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Face {
    XMin,
    XMax,
    YMin,
    YMax,
    ZMin,
    ZMax,
}

impl Face {
    pub fn axis(self) -> usize {
        match self {
            Face::XMin | Face::XMax => 0,
            Face::YMin | Face::YMax => 1,
            Face::ZMin | Face::ZMax => 2,
        }
    }

    pub fn is_max(self) -> bool {
        matches!(self, Face::XMax | Face::YMax | Face::ZMax)
    }
}

/// Boundary data of the estimation problem: `u = c0` on the `x = 0` face,
/// `−n·(d∇u) = M(u − c1)` on the `x = L` face, zero flux elsewhere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimationBc {
    pub c0: f64,
    pub c1: f64,
    pub mass_transfer: f64,
}

impl EstimationBc {
    pub fn new(c0: f64, c1: f64, mass_transfer: f64) -> Result<Self, GridError> {
        let bc = Self { c0, c1, mass_transfer };
        bc.validate()?;
        Ok(bc)
    }

    pub(crate) fn validate(&self) -> Result<(), GridError> {
        if !(self.mass_transfer > 0.0 && self.mass_transfer.is_finite()) {
            return Err(GridError::Boundary("mass transfer coefficient must be positive"));
        }
        if !(self.c0.is_finite() && self.c1.is_finite()) {
            return Err(GridError::Boundary("concentrations must be finite"));
        }
        Ok(())
    }
}

/// Robin outlet on the `x = L` face.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Robin {
    pub mass_transfer: f64,
    pub bulk: f64,
}

/// Boundary setup for transient runs; a missing inlet or outlet is insulated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundarySetup {
    pub inlet: Option<f64>,
    pub outlet: Option<Robin>,
}

impl BoundarySetup {
    pub fn insulated() -> Self {
        Self { inlet: None, outlet: None }
    }

    pub(crate) fn validate(&self) -> Result<(), GridError> {
        if let Some(r) = self.outlet {
            EstimationBc::new(0.0, r.bulk, r.mass_transfer)?;
        }
        if self.inlet.is_some_and(|c| !c.is_finite()) {
            return Err(GridError::Boundary("inlet concentration must be finite"));
        }
        Ok(())
    }
}

impl From<EstimationBc> for BoundarySetup {
    fn from(bc: EstimationBc) -> Self {
        Self {
            inlet: Some(bc.c0),
            outlet: Some(Robin { mass_transfer: bc.mass_transfer, bulk: bc.c1 }),
        }
    }
}
