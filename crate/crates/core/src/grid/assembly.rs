//! Exact element integrals for multilinear (Q1) elements on a uniform box
//! and the global assembly routines built on them.

use super::sparse::CsrMatrix;
use super::{Face, StructuredGrid, TensorField};

/// Integrals of products of the `2^dim` corner shape functions on one cell.
pub(crate) struct ReferenceElement {
    dim: usize,
    corners: usize,
    /// `gg[i][j][a][b] = ∫ ∂ᵢφ_a ∂ⱼφ_b`.
    gg: [[[[f64; 8]; 8]; 3]; 3],
    /// `grad[i][a] = ∫ ∂ᵢφ_a`.
    grad: [[f64; 8]; 3],
    /// `∫ φ_a`, identical for every corner.
    lumped: f64,
}

#[inline]
fn bit(a: usize, axis: usize) -> usize {
    (a >> axis) & 1
}

#[inline]
fn sign(b: usize) -> f64 {
    if b == 1 {
        1.0
    } else {
        -1.0
    }
}

// 1D integrals on [0, h] with N₀ = 1 − x/h, N₁ = x/h.
fn mass_1d(h: f64, a: usize, b: usize) -> f64 {
    if a == b {
        h / 3.0
    } else {
        h / 6.0
    }
}

fn stiff_1d(h: f64, a: usize, b: usize) -> f64 {
    if a == b {
        1.0 / h
    } else {
        -1.0 / h
    }
}

/// `∫ N'_a N_b`
fn mixed_1d(a: usize) -> f64 {
    0.5 * sign(a)
}

impl ReferenceElement {
    pub(crate) fn new(grid: &StructuredGrid) -> Self {
        let dim = grid.dim();
        let h = grid.spacings();
        let corners = 1 << dim;
        let mut gg = [[[[0.0; 8]; 8]; 3]; 3];
        let mut grad = [[0.0; 8]; 3];
        for i in 0..dim {
            for j in 0..dim {
                for a in 0..corners {
                    for b in 0..corners {
                        let mut v = 1.0;
                        for k in 0..dim {
                            let (ak, bk) = (bit(a, k), bit(b, k));
                            v *= if i == j && k == i {
                                stiff_1d(h[k], ak, bk)
                            } else if k == i {
                                mixed_1d(ak)
                            } else if k == j {
                                mixed_1d(bk)
                            } else {
                                mass_1d(h[k], ak, bk)
                            };
                        }
                        gg[i][j][a][b] = v;
                    }
                }
            }
            for (a, g) in grad[i].iter_mut().enumerate().take(corners) {
                let mut v = sign(bit(a, i));
                for (k, hk) in h.iter().enumerate().take(dim) {
                    if k != i {
                        v *= 0.5 * hk;
                    }
                }
                *g = v;
            }
        }
        let lumped = grid.cell_volume() / corners as f64;
        Self { dim, corners, gg, grad, lumped }
    }

    #[inline]
    pub(crate) fn corners(&self) -> usize {
        self.corners
    }

    #[inline]
    pub(crate) fn lumped(&self) -> f64 {
        self.lumped
    }

    #[inline]
    pub(crate) fn grad(&self, axis: usize, corner: usize) -> f64 {
        self.grad[axis][corner]
    }

    /// Element stiffness `∫ ∇φ_a · D ∇φ_b` for a constant tensor.
    pub(crate) fn stiffness(&self, field: &TensorField, cell: usize) -> [[f64; 8]; 8] {
        let d = field.tensor(cell).block();
        let mut k = [[0.0; 8]; 8];
        // upper triangle only, mirrored so the element matrix is bitwise symmetric
        for a in 0..self.corners {
            for b in a..self.corners {
                let mut v = 0.0;
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        v += d[i][j] * self.gg[i][j][a][b];
                    }
                }
                k[a][b] = v;
                k[b][a] = v;
            }
        }
        k
    }
}

/// Options for [`assemble_operator`].
pub(crate) struct OperatorParts {
    pub periodic: bool,
    /// Scale of the lumped capacity term `σ/dt`; `None` for stationary problems.
    pub capacity_over_dt: Option<f64>,
    pub include_reaction: bool,
}

/// Global stiffness plus optional lumped capacity and reaction terms.
pub(crate) fn assemble_operator(field: &TensorField, parts: &OperatorParts) -> CsrMatrix {
    let grid = field.grid();
    let reference = ReferenceElement::new(grid);
    let mut mat = CsrMatrix::grid_pattern(grid, parts.periodic);
    let corners = reference.corners();
    for cell in 0..grid.cell_count() {
        let nodes = grid.cell_nodes(cell, parts.periodic);
        let ke = reference.stiffness(field, cell);
        let mut diag_extra = 0.0;
        if let Some(inv_dt) = parts.capacity_over_dt {
            diag_extra += field.sigma(cell) * inv_dt * reference.lumped();
        }
        if parts.include_reaction {
            diag_extra += field.reaction(cell) * reference.lumped();
        }
        for a in 0..corners {
            for b in 0..corners {
                mat.add(nodes[a], nodes[b], ke[a][b]);
            }
            if diag_extra != 0.0 {
                mat.add(nodes[a], nodes[a], diag_extra);
            }
        }
    }
    mat
}

/// Lumped nodal weights `Σ_e σ_e ∫_e φ_a` (or plain volumes when `capacity` is false).
pub(crate) fn lumped_weights(field: &TensorField, capacity: bool, periodic: bool) -> Vec<f64> {
    let grid = field.grid();
    let reference = ReferenceElement::new(grid);
    let mut w = vec![0.0; grid.node_count(periodic)];
    for cell in 0..grid.cell_count() {
        let s = if capacity { field.sigma(cell) } else { 1.0 };
        for &n in &grid.cell_nodes(cell, periodic)[..reference.corners()] {
            w[n] += s * reference.lumped();
        }
    }
    w
}

/// Lumped source load `Σ_e f_e ∫_e φ_a`; exact for element-constant `f`.
pub(crate) fn source_load(field: &TensorField) -> Vec<f64> {
    let grid = field.grid();
    let reference = ReferenceElement::new(grid);
    let mut f = vec![0.0; grid.node_count(false)];
    if !field.has_source() {
        return f;
    }
    for cell in 0..grid.cell_count() {
        let fe = field.source(cell) * reference.lumped();
        for &n in &grid.cell_nodes(cell, false)[..reference.corners()] {
            f[n] += fe;
        }
    }
    f
}

/// Node numbers on a boundary face together with their exact trapezoidal
/// weights, which integrate multilinear traces exactly.
pub(crate) fn face_nodes(grid: &StructuredGrid, face: Face, periodic: bool) -> Vec<(usize, f64)> {
    let shape = grid.node_shape(periodic);
    let axis = face.axis();
    let fixed = if face.is_max() && !periodic { shape[axis] - 1 } else { 0 };
    let mut out = Vec::new();
    for n in 0..grid.node_count(periodic) {
        let c = grid.node_coords(n, periodic);
        if c[axis] != fixed {
            continue;
        }
        let mut w = 1.0;
        for t in 0..grid.dim() {
            if t == axis {
                continue;
            }
            let h = grid.spacing(t);
            let end = !periodic && (c[t] == 0 || c[t] == shape[t] - 1);
            w *= if end { 0.5 * h } else { h };
        }
        out.push((n, w));
    }
    out
}

/// Adds `coef · ∫_face φ_a φ_b` (exact face mass) to the matrix and returns
/// the face load `∫_face φ_a` per node.
pub(crate) fn add_face_mass(mat: &mut CsrMatrix, grid: &StructuredGrid, face: Face, coef: f64) -> Vec<f64> {
    let dim = grid.dim();
    let axis = face.axis();
    let side = usize::from(face.is_max());
    let boundary_layer = if face.is_max() { grid.cells(axis) - 1 } else { 0 };
    let corners = 1 << dim;
    let mut load = vec![0.0; grid.node_count(false)];
    for cell in 0..grid.cell_count() {
        if grid.cell_coords(cell)[axis] != boundary_layer {
            continue;
        }
        let nodes = grid.cell_nodes(cell, false);
        for ca in (0..corners).filter(|c| bit(*c, axis) == side) {
            let mut face_int = 1.0;
            for t in (0..dim).filter(|t| *t != axis) {
                face_int *= 0.5 * grid.spacing(t);
            }
            load[nodes[ca]] += face_int;
            for cb in (0..corners).filter(|c| bit(*c, axis) == side) {
                let mut m = 1.0;
                for t in (0..dim).filter(|t| *t != axis) {
                    m *= mass_1d(grid.spacing(t), bit(ca, t), bit(cb, t));
                }
                mat.add(nodes[ca], nodes[cb], coef * m);
            }
        }
    }
    load
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::SymTensor;

    #[test]
    fn stiffness_rows_sum_to_zero_and_symmetric() {
        let grid = StructuredGrid::new(&[1.0, 2.0, 0.5], &[1, 1, 1]).unwrap();
        let t = SymTensor::from_rows(&[&[4.0, 1.0, 0.5], &[1.0, 3.0, 0.2], &[0.5, 0.2, 2.0]]).unwrap();
        let field = TensorField::uniform(grid.clone(), t).unwrap();
        let k = ReferenceElement::new(&grid).stiffness(&field, 0);
        for a in 0..8 {
            assert!(k[a].iter().sum::<f64>().abs() < 1e-13);
            for b in 0..8 {
                assert!((k[a][b] - k[b][a]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn energy_of_linear_function() {
        // u = x + 2y on a 2D box: ∫ ∇u·D∇u = vol · gᵀDg
        let grid = StructuredGrid::new(&[0.5, 0.25], &[1, 1]).unwrap();
        let t = SymTensor::from_rows(&[&[3.0, 1.0], &[1.0, 2.0]]).unwrap();
        let field = TensorField::uniform(grid.clone(), t).unwrap();
        let k = ReferenceElement::new(&grid).stiffness(&field, 0);
        let u: Vec<f64> = (0..4)
            .map(|a| 0.5 * bit(a, 0) as f64 + 2.0 * 0.25 * bit(a, 1) as f64)
            .collect();
        let mut e = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                e += u[a] * k[a][b] * u[b];
            }
        }
        let g = [1.0, 2.0];
        let expected = 0.125 * (3.0 * g[0] * g[0] + 2.0 * 1.0 * g[0] * g[1] + 2.0 * g[1] * g[1]);
        assert!((e - expected).abs() < 1e-14);
    }

    #[test]
    fn assembled_matrix_is_symmetric() {
        let grid = StructuredGrid::unit(2, 4).unwrap();
        let t = SymTensor::from_rows(&[&[3.0, 1.0], &[1.0, 2.0]]).unwrap();
        let field = TensorField::uniform(grid.clone(), t).unwrap();
        for periodic in [false, true] {
            let a = assemble_operator(
                &field,
                &OperatorParts { periodic, capacity_over_dt: None, include_reaction: false },
            );
            assert_eq!(a.asymmetry(), 0.0);
        }
    }
}
