use super::assembly::{assemble_operator, OperatorParts, ReferenceElement};
use super::sparse::pcg;
use super::{ScalarField, SolveError, SolverConfig, TensorField};
use crate::tensor::{Matrix, SymTensor};

/// Periodic correctors and the homogenized tensor of one period cell.
#[derive(Clone, Debug)]
pub struct CellSolution {
    /// `φ_j` for each coordinate direction, zero nodal mean, periodic.
    pub correctors: Vec<ScalarField>,
    pub effective: SymTensor,
}

/// Solves the periodic cell problems `∇·(d∇φ_j) = ∇·(d e_j)` on the grid of
/// `field`, read as one period, and averages `d(e_j − ∇φ_j)`.
///
/// Each corrector is sought in the zero-mean subspace; the constant null space
/// is removed inside the conjugate gradient iteration.
pub fn solve_cell_problem(field: &TensorField, config: &SolverConfig) -> Result<CellSolution, SolveError> {
    let grid = field.grid();
    let dim = grid.dim();
    let reference = ReferenceElement::new(grid);
    let corners = reference.corners();
    let stiffness = assemble_operator(
        field,
        &OperatorParts { periodic: true, capacity_over_dt: None, include_reaction: false },
    );
    let n = grid.node_count(true);
    let cells = grid.cell_count();
    let cell_nodes: Vec<[usize; 8]> = (0..cells).map(|c| grid.cell_nodes(c, true)).collect();

    let volume = grid.volume();
    let cell_volume = grid.cell_volume();
    let mut mean_d = [[0.0; 3]; 3];
    for t in field.tensors() {
        let b = t.block();
        for i in 0..dim {
            for j in 0..dim {
                mean_d[i][j] += b[i][j] * cell_volume;
            }
        }
    }

    let mut effective = [[0.0; 3]; 3];
    let mut correctors = Vec::with_capacity(dim);
    for j in 0..dim {
        // load: ∫ (d e_j)·∇φ_a
        let mut rhs = vec![0.0; n];
        for (cell, nodes) in cell_nodes.iter().enumerate() {
            let d = field.tensor(cell).block();
            for a in 0..corners {
                let mut v = 0.0;
                for i in 0..dim {
                    v += d[i][j] * reference.grad(i, a);
                }
                rhs[nodes[a]] += v;
            }
        }
        let (phi, _) = pcg(&stiffness, &rhs, None, config, dim, true)?;

        // ⟨d_ij − d_ik ∂_k φ_j⟩
        let mut correction = [0.0; 3];
        for (cell, nodes) in cell_nodes.iter().enumerate() {
            let d = field.tensor(cell).block();
            let mut grad_int = [0.0; 3];
            for (k, g) in grad_int.iter_mut().enumerate().take(dim) {
                *g = (0..corners).map(|a| phi[nodes[a]] * reference.grad(k, a)).sum();
            }
            for (i, c) in correction.iter_mut().enumerate().take(dim) {
                *c += (0..dim).map(|k| d[i][k] * grad_int[k]).sum::<f64>();
            }
        }
        for i in 0..dim {
            effective[i][j] = (mean_d[i][j] - correction[i]) / volume;
        }
        correctors.push(ScalarField::new_periodic(grid.clone(), phi)?);
    }
    let effective = SymTensor::symmetrized(&Matrix::from_block(dim, effective))
        .map_err(|_| SolveError::NotPositiveDefinite { iteration: 0 })?;
    Ok(CellSolution { correctors, effective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::StructuredGrid;
    use crate::tensor::{layered_effective_tensor, LayeredMedium};

    #[test]
    fn constant_tensor_has_zero_correctors() {
        let t = SymTensor::from_rows(&[&[3.0, 0.5, 0.1], &[0.5, 2.0, 0.2], &[0.1, 0.2, 1.0]]).unwrap();
        let field = TensorField::uniform(StructuredGrid::unit(3, 3).unwrap(), t).unwrap();
        let sol = solve_cell_problem(&field, &SolverConfig::default()).unwrap();
        for phi in &sol.correctors {
            assert!(phi.values().iter().all(|v| v.abs() < 1e-12));
        }
        for i in 0..3 {
            for j in 0..3 {
                assert!((sol.effective.get(i, j) - t.get(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn layered_cell_matches_closed_form() {
        // layers normal to axis 1: rows j < 3 are phase 1, j ≥ 3 phase 2
        let grid = StructuredGrid::new(&[1.0, 1.0], &[4, 8]).unwrap();
        let p1 = SymTensor::diagonal(&[2.0, 1.0]).unwrap();
        let p2 = SymTensor::diagonal(&[7.0, 5.0]).unwrap();
        let tensors = (0..grid.cell_count())
            .map(|c| if grid.cell_coords(c)[1] < 3 { p1 } else { p2 })
            .collect();
        let field = TensorField::new(grid, tensors).unwrap();
        let sol = solve_cell_problem(&field, &SolverConfig::with_tolerance(1e-13)).unwrap();
        let exact = layered_effective_tensor(&LayeredMedium {
            phase1_thickness: 3.0,
            phase2_thickness: 5.0,
            phase1: p1,
            phase2: p2,
            partition_coefficient: 1.0,
            normal_axis: 1,
        })
        .unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let e = exact.get(i, j);
                let got = sol.effective.get(i, j);
                assert!((got - e).abs() <= 1e-8 * e.abs().max(1.0), "({i},{j}) {got} vs {e}");
            }
        }
        // correctors keep zero mean
        for phi in &sol.correctors {
            assert!(phi.mean().abs() < 1e-12);
        }
    }
}
