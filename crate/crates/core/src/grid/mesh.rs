use super::GridError;
use crate::tensor::SymTensor;

/// Uniform tensor-product grid on `(0, L₁) × … × (0, L_dim)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuredGrid {
    dim: usize,
    extent: [f64; 3],
    cells: [usize; 3],
}

impl StructuredGrid {
    pub fn new(extent: &[f64], cells: &[usize]) -> Result<Self, GridError> {
        let dim = extent.len();
        if !(dim == 2 || dim == 3) || cells.len() != dim {
            return Err(GridError::Dimension(dim));
        }
        let mut e = [1.0; 3];
        let mut c = [1; 3];
        for axis in 0..dim {
            if !(extent[axis] > 0.0 && extent[axis].is_finite()) {
                return Err(GridError::Extent { axis, value: extent[axis] });
            }
            if cells[axis] == 0 {
                return Err(GridError::NoCells { axis });
            }
            e[axis] = extent[axis];
            c[axis] = cells[axis];
        }
        Ok(Self { dim, extent: e, cells: c })
    }

    /// Unit square or cube with `cells` elements along every axis.
    pub fn unit(dim: usize, cells: usize) -> Result<Self, GridError> {
        Self::new(&vec![1.0; dim], &vec![cells; dim])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn extent(&self, axis: usize) -> f64 {
        self.extent[axis]
    }

    #[inline]
    pub fn cells(&self, axis: usize) -> usize {
        self.cells[axis]
    }

    #[inline]
    pub fn spacing(&self, axis: usize) -> f64 {
        self.extent[axis] / self.cells[axis] as f64
    }

    pub fn spacings(&self) -> [f64; 3] {
        [self.spacing(0), self.spacing(1), self.spacing(2)]
    }

    pub fn cell_count(&self) -> usize {
        self.cells[..self.dim].iter().product()
    }

    pub fn volume(&self) -> f64 {
        self.extent[..self.dim].iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).product()
    }

    /// Node counts per axis; axes beyond `dim` report 1.
    pub fn node_shape(&self, periodic: bool) -> [usize; 3] {
        let mut s = [1; 3];
        for (axis, n) in s.iter_mut().enumerate().take(self.dim) {
            *n = if periodic { self.cells[axis] } else { self.cells[axis] + 1 };
        }
        s
    }

    pub fn node_count(&self, periodic: bool) -> usize {
        self.node_shape(periodic).iter().product()
    }

    /// Linear cell index with axis 0 running fastest.
    #[inline]
    pub fn cell_index(&self, ijk: [usize; 3]) -> usize {
        ijk[0] + self.cells[0] * (ijk[1] + self.cells[1] * ijk[2])
    }

    pub fn cell_coords(&self, cell: usize) -> [usize; 3] {
        let i = cell % self.cells[0];
        let rest = cell / self.cells[0];
        let j = rest % self.cells[1];
        let k = rest / self.cells[1];
        [i, j, k]
    }

    pub fn node_coords(&self, node: usize, periodic: bool) -> [usize; 3] {
        let s = self.node_shape(periodic);
        [node % s[0], (node / s[0]) % s[1], node / (s[0] * s[1])]
    }

    pub fn node_position(&self, node: usize, periodic: bool) -> [f64; 3] {
        let c = self.node_coords(node, periodic);
        let mut p = [0.0; 3];
        for axis in 0..self.dim {
            p[axis] = c[axis] as f64 * self.spacing(axis);
        }
        p
    }

    #[inline]
    pub(crate) fn node_index(&self, c: [usize; 3], periodic: bool) -> usize {
        let s = self.node_shape(periodic);
        c[0] + s[0] * (c[1] + s[1] * c[2])
    }

    /// Global node numbers of the `2^dim` corners of a cell.
    ///
    /// Corner `a` sits at offset bit `(a >> axis) & 1` along each axis.
    pub(crate) fn cell_nodes(&self, cell: usize, periodic: bool) -> [usize; 8] {
        let base = self.cell_coords(cell);
        let mut out = [0; 8];
        for (a, slot) in out.iter_mut().enumerate().take(1 << self.dim) {
            let mut c = [0; 3];
            for axis in 0..self.dim {
                let mut v = base[axis] + ((a >> axis) & 1);
                if periodic && v == self.cells[axis] {
                    v = 0;
                }
                c[axis] = v;
            }
            *slot = self.node_index(c, periodic);
        }
        out
    }
}

/// Piecewise-constant coefficients on the cells of a grid.
///
/// Every cell carries a diffusion tensor; capacity (`sigma`), linear reaction
/// rate and volumetric source are optional and default to 1, 0 and 0.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorField {
    grid: StructuredGrid,
    tensors: Vec<SymTensor>,
    sigma: Option<Vec<f64>>,
    reaction: Option<Vec<f64>>,
    source: Option<Vec<f64>>,
}

impl TensorField {
    pub fn new(grid: StructuredGrid, tensors: Vec<SymTensor>) -> Result<Self, GridError> {
        if tensors.len() != grid.cell_count() {
            return Err(GridError::CellCount {
                expected: grid.cell_count(),
                got: tensors.len(),
            });
        }
        if let Some(t) = tensors.iter().find(|t| t.dim() != grid.dim()) {
            return Err(GridError::TensorDimension { grid: grid.dim(), tensor: t.dim() });
        }
        Ok(Self { grid, tensors, sigma: None, reaction: None, source: None })
    }

    pub fn uniform(grid: StructuredGrid, tensor: SymTensor) -> Result<Self, GridError> {
        let n = grid.cell_count();
        Self::new(grid, vec![tensor; n])
    }

    pub fn with_sigma(mut self, sigma: Vec<f64>) -> Result<Self, GridError> {
        self.check_len(sigma.len())?;
        if sigma.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(GridError::Coefficient("capacity must be positive"));
        }
        self.sigma = Some(sigma);
        Ok(self)
    }

    pub fn with_reaction(mut self, reaction: Vec<f64>) -> Result<Self, GridError> {
        self.check_len(reaction.len())?;
        if reaction.iter().any(|r| !(*r >= 0.0 && r.is_finite())) {
            return Err(GridError::Coefficient("reaction rate must be non-negative"));
        }
        self.reaction = Some(reaction);
        Ok(self)
    }

    pub fn with_source(mut self, source: Vec<f64>) -> Result<Self, GridError> {
        self.check_len(source.len())?;
        if source.iter().any(|f| !f.is_finite()) {
            return Err(GridError::Coefficient("source must be finite"));
        }
        self.source = Some(source);
        Ok(self)
    }

    fn check_len(&self, len: usize) -> Result<(), GridError> {
        if len == self.tensors.len() {
            Ok(())
        } else {
            Err(GridError::CellCount { expected: self.tensors.len(), got: len })
        }
    }

    pub fn grid(&self) -> &StructuredGrid {
        &self.grid
    }

    pub fn tensors(&self) -> &[SymTensor] {
        &self.tensors
    }

    #[inline]
    pub fn tensor(&self, cell: usize) -> &SymTensor {
        &self.tensors[cell]
    }

    #[inline]
    pub fn sigma(&self, cell: usize) -> f64 {
        self.sigma.as_ref().map_or(1.0, |s| s[cell])
    }

    #[inline]
    pub fn reaction(&self, cell: usize) -> f64 {
        self.reaction.as_ref().map_or(0.0, |r| r[cell])
    }

    #[inline]
    pub fn source(&self, cell: usize) -> f64 {
        self.source.as_ref().map_or(0.0, |f| f[cell])
    }

    pub fn has_reaction(&self) -> bool {
        self.reaction.is_some()
    }

    pub fn has_source(&self) -> bool {
        self.source.is_some()
    }

    /// Volume average of the capacity factor.
    pub fn mean_sigma(&self) -> f64 {
        (0..self.tensors.len()).map(|c| self.sigma(c)).sum::<f64>() / self.tensors.len() as f64
    }

    pub fn mean_reaction(&self) -> f64 {
        (0..self.tensors.len()).map(|c| self.reaction(c)).sum::<f64>() / self.tensors.len() as f64
    }
}

/// Nodal values of a multilinear function on a grid.
///
/// Periodic fields identify the last node layer with the first and store
/// `cells` nodes per axis instead of `cells + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: StructuredGrid,
    periodic: bool,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: StructuredGrid, values: Vec<f64>) -> Result<Self, GridError> {
        Self::build(grid, false, values)
    }

    pub fn new_periodic(grid: StructuredGrid, values: Vec<f64>) -> Result<Self, GridError> {
        Self::build(grid, true, values)
    }

    fn build(grid: StructuredGrid, periodic: bool, values: Vec<f64>) -> Result<Self, GridError> {
        let expected = grid.node_count(periodic);
        if values.len() != expected {
            return Err(GridError::NodeCount { expected, got: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(GridError::Coefficient("nodal values must be finite"));
        }
        Ok(Self { grid, periodic, values })
    }

    pub fn zeros(grid: StructuredGrid) -> Self {
        let n = grid.node_count(false);
        Self { grid, periodic: false, values: vec![0.0; n] }
    }

    /// Samples `f` at every node position.
    pub fn from_fn(grid: StructuredGrid, f: impl Fn([f64; 3]) -> f64) -> Result<Self, GridError> {
        let values = (0..grid.node_count(false))
            .map(|n| f(grid.node_position(n, false)))
            .collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &StructuredGrid {
        &self.grid
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at integer node coordinates.
    pub fn at(&self, c: [usize; 3]) -> f64 {
        self.values[self.grid.node_index(c, self.periodic)]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}
