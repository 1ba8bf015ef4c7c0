use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ExperimentError;
use crate::grid::{EstimationBc, SolverConfig, StructuredGrid, TensorField};
use crate::tensor::{rotate_tensor, trial_seed, Rotation, SymTensor};

/// One Monte Carlo campaign on the unit square or cube.
///
/// The domain is split into `n^dim` sub-cells, each carrying `T Q Tᵀ` for an
/// independent Haar-uniform rotation `T`; every sub-cell is meshed with
/// `refinement^dim` elements.
#[derive(Clone, Debug, PartialEq)]
pub struct McConfig {
    pub dim: usize,
    pub n: usize,
    pub trials: usize,
    pub q: SymTensor,
    pub master_seed: u64,
    pub bc: EstimationBc,
    pub refinement: usize,
    pub solver: SolverConfig,
}

impl McConfig {
    /// Campaign with the default boundary data `c0 = 1`, `c1 = 0`,
    /// `M = 0.5 · d_ref / L` (`d_ref` the geometric mean of `Q`'s diagonal,
    /// `L = 1`) and default refinement (3 in 2D, 2 in 3D).
    pub fn new(q_diagonal: &[f64], n: usize, trials: usize, master_seed: u64) -> Result<Self, ExperimentError> {
        let q = SymTensor::diagonal(q_diagonal)?;
        let dim = q.dim();
        let config = Self {
            dim,
            n,
            trials,
            q,
            master_seed,
            bc: EstimationBc::new(1.0, 0.0, default_mass_transfer(&q))?,
            refinement: if dim == 2 { 3 } else { 2 },
            solver: SolverConfig::default(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.n == 0 {
            return Err(ExperimentError::Config("n must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(ExperimentError::Config("trials must be at least 1".into()));
        }
        if self.refinement == 0 {
            return Err(ExperimentError::Config("refinement must be at least 1".into()));
        }
        if self.q.dim() != self.dim {
            return Err(ExperimentError::Config("Q dimension differs from dim".into()));
        }
        if !self.q.is_diagonal() {
            return Err(ExperimentError::Config("Q must be diagonal".into()));
        }
        self.bc.validate()?;
        Ok(())
    }
}

/// `M = 0.5 · (Π q_ii)^(1/dim)` for a unit-length domain.
pub(crate) fn default_mass_transfer(q: &SymTensor) -> f64 {
    0.5 * q.det().powf(1.0 / q.dim() as f64)
}

/// Builds the coefficient realization of one trial.
///
/// Rotations are drawn from a ChaCha8 stream seeded with
/// `trial_seed(master_seed, trial_index)`, sub-cells visited with the x index
/// running fastest.
pub fn build_random_field(config: &McConfig, trial_index: usize) -> Result<TensorField, ExperimentError> {
    config.validate()?;
    let dim = config.dim;
    let m = config.refinement;
    let grid = StructuredGrid::unit(dim, config.n * m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(config.master_seed, trial_index as u64));
    let sub_cells = config.n.pow(dim as u32);
    let sub_tensors: Vec<SymTensor> = (0..sub_cells)
        .map(|_| rotate_tensor(&Rotation::sample(dim, &mut rng).matrix(), &config.q))
        .collect::<Result<_, _>>()?;
    let tensors = (0..grid.cell_count())
        .map(|cell| {
            let c = grid.cell_coords(cell);
            let (i, j, k) = (c[0] / m, c[1] / m, if dim == 3 { c[2] / m } else { 0 });
            sub_tensors[i + config.n * (j + config.n * k)]
        })
        .collect();
    Ok(TensorField::new(grid, tensors)?)
}

/// `√(det Q)`, the exact effective diffusivity of the random 2D medium.
pub fn geometric_mean_reference(q: &SymTensor) -> Result<f64, ExperimentError> {
    if q.dim() != 2 {
        return Err(ExperimentError::Config("the closed form exists only in 2D".into()));
    }
    Ok((q.get(0, 0) * q.get(1, 1)).sqrt())
}
