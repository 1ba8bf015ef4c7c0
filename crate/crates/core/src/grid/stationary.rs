use super::assembly::{add_face_mass, assemble_operator, face_nodes, source_load, OperatorParts};
use super::sparse::{pcg, CsrMatrix};
use super::{
    BoundarySetup, EstimationBc, Face, GridError, ScalarField, SolveError, SolverConfig,
    StructuredGrid, TensorField,
};

/// Assembled, constrained system for one boundary setup.
pub(crate) struct BoundarySystem {
    pub matrix: CsrMatrix,
    pub fixed: Vec<Option<f64>>,
    /// Right-hand side contributions that do not depend on the state:
    /// source load plus Robin bulk load, minus the Dirichlet lift; constrained
    /// rows hold `a_dd · g_d`.
    pub constant_rhs: Vec<f64>,
}

impl BoundarySystem {
    pub(crate) fn build(
        field: &TensorField,
        bc: &BoundarySetup,
        capacity_over_dt: Option<f64>,
    ) -> Result<(Self, CsrMatrix), GridError> {
        bc.validate()?;
        let grid = field.grid();
        let mut matrix = assemble_operator(
            field,
            &OperatorParts { periodic: false, capacity_over_dt, include_reaction: true },
        );
        let mut rhs = source_load(field);
        if let Some(robin) = bc.outlet {
            let load = add_face_mass(&mut matrix, grid, Face::XMax, robin.mass_transfer);
            for (r, l) in rhs.iter_mut().zip(load) {
                *r += robin.mass_transfer * robin.bulk * l;
            }
        }
        let unconstrained = matrix.clone();
        let mut fixed = vec![None; grid.node_count(false)];
        if let Some(c0) = bc.inlet {
            for (n, _) in face_nodes(grid, Face::XMin, false) {
                fixed[n] = Some(c0);
            }
        }
        let lift = matrix.constrain(&fixed);
        for (i, r) in rhs.iter_mut().enumerate() {
            *r = match fixed[i] {
                Some(g) => matrix.get(i, i) * g,
                None => *r - lift[i],
            };
        }
        Ok((Self { matrix, fixed, constant_rhs: rhs }, unconstrained))
    }
}

/// Solves `−∇·(d∇u) + r u = f` with the estimation boundary conditions.
///
/// Reaction and source terms are taken from the field when present; the
/// effective-diffusivity estimator uses fields without them.
pub fn solve_stationary_bvp(
    field: &TensorField,
    bc: &EstimationBc,
    config: &SolverConfig,
) -> Result<ScalarField, SolveError> {
    let (system, _) = BoundarySystem::build(field, &(*bc).into(), None)?;
    let (u, _) = pcg(
        &system.matrix,
        &system.constant_rhs,
        None,
        config,
        field.grid().dim(),
        false,
    )?;
    Ok(ScalarField::new(field.grid().clone(), u)?)
}

/// Mean of the multilinear trace of `u` over a boundary face.
pub fn boundary_average(u: &ScalarField, face: Face) -> f64 {
    let nodes = face_nodes(u.grid(), face, u.is_periodic());
    let mut integral = 0.0;
    let mut measure = 0.0;
    for (n, w) in nodes {
        integral += w * u.values()[n];
        measure += w;
    }
    integral / measure
}

fn face_measure(grid: &StructuredGrid, axis: usize) -> f64 {
    (0..grid.dim()).filter(|t| *t != axis).map(|t| grid.extent(t)).product()
}

/// Quantities behind one effective-diffusivity estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub d_eff: f64,
    pub u_out: f64,
    pub n_average: f64,
    pub solution: ScalarField,
}

/// Estimates the `(1,1)` effective diffusivity from the stationary
/// inlet/outlet experiment: `d_eff = N_average · L / (c0 − u_out)`.
pub fn estimate_effective_diffusivity(
    field: &TensorField,
    bc: &EstimationBc,
    config: &SolverConfig,
) -> Result<f64, SolveError> {
    estimate_report(field, bc, config).map(|r| r.d_eff)
}

pub fn estimate_report(
    field: &TensorField,
    bc: &EstimationBc,
    config: &SolverConfig,
) -> Result<EstimateReport, SolveError> {
    let solution = solve_stationary_bvp(field, bc, config)?;
    let u_out = boundary_average(&solution, Face::XMax);
    // M(u − c1) is affine in u, so its face mean is M(u_out − c1)
    let n_average = bc.mass_transfer * (u_out - bc.c1);
    let drop = bc.c0 - u_out;
    if drop.abs() < 1e-14 * bc.c0.abs() || drop == 0.0 {
        return Err(SolveError::DegenerateGradient);
    }
    let length = field.grid().extent(0);
    Ok(EstimateReport { d_eff: n_average * length / drop, u_out, n_average, solution })
}

/// Total inflow through the Dirichlet face and total Robin outflow for a
/// stationary solution, both as integrals over their faces.
pub fn boundary_fluxes(field: &TensorField, bc: &EstimationBc, u: &ScalarField) -> Result<(f64, f64), SolveError> {
    let setup: BoundarySetup = (*bc).into();
    let (system, unconstrained) = BoundarySystem::build(field, &setup, None)?;
    let au = unconstrained.mul_vec(u.values());
    let load = source_load(field);
    let grid = field.grid();
    let inflow: f64 = system
        .fixed
        .iter()
        .enumerate()
        .filter(|(_, g)| g.is_some())
        .map(|(i, _)| au[i] - load[i])
        .sum();
    let outflow = face_measure(grid, 0) * bc.mass_transfer * (boundary_average(u, Face::XMax) - bc.c1);
    Ok((inflow, outflow))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::SymTensor;

    fn iso_field(dim: usize, cells: usize, d: f64) -> TensorField {
        let grid = StructuredGrid::unit(dim, cells).unwrap();
        TensorField::uniform(grid, SymTensor::isotropic(dim, d).unwrap()).unwrap()
    }

    #[test]
    fn linear_profile_matches_robin_solution() {
        let (d, m, c0) = (2.0, 3.0, 1.0);
        let field = iso_field(2, 8, d);
        let bc = EstimationBc::new(c0, 0.0, m).unwrap();
        let u = solve_stationary_bvp(&field, &bc, &SolverConfig::with_tolerance(1e-14)).unwrap();
        let u_l = c0 * d / (d + m);
        for n in 0..u.values().len() {
            let x = field.grid().node_position(n, false)[0];
            let exact = c0 + (u_l - c0) * x;
            assert!((u.values()[n] - exact).abs() < 1e-10, "node {n}");
        }
    }

    #[test]
    fn single_cell_dirichlet_interpolant() {
        let field = iso_field(2, 1, 1.0);
        let bc = EstimationBc::new(1.0, 0.0, 1.0).unwrap();
        let u = solve_stationary_bvp(&field, &bc, &SolverConfig::default()).unwrap();
        // u(L) = d/(d + M L) = 0.5 on both outlet corners
        assert!((u.at([1, 0, 0]) - 0.5).abs() < 1e-12);
        assert!((u.at([1, 1, 0]) - 0.5).abs() < 1e-12);
        assert_eq!(u.at([0, 1, 0]), 1.0);
    }

    #[test]
    fn doubling_d_and_m_leaves_solution() {
        let bc = EstimationBc::new(1.0, 0.2, 0.7).unwrap();
        let bc2 = EstimationBc::new(1.0, 0.2, 1.4).unwrap();
        let cfg = SolverConfig::with_tolerance(1e-13);
        let t = SymTensor::from_rows(&[&[3.0, 0.4], &[0.4, 1.0]]).unwrap();
        let grid = StructuredGrid::unit(2, 6).unwrap();
        let f1 = TensorField::uniform(grid.clone(), t).unwrap();
        let f2 = TensorField::uniform(grid, t.scaled(2.0).unwrap()).unwrap();
        let u1 = solve_stationary_bvp(&f1, &bc, &cfg).unwrap();
        let u2 = solve_stationary_bvp(&f2, &bc2, &cfg).unwrap();
        for (a, b) in u1.values().iter().zip(u2.values()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn face_averages_of_linear_fields() {
        let grid = StructuredGrid::unit(2, 4).unwrap();
        let five = ScalarField::from_fn(grid.clone(), |_| 5.0).unwrap();
        assert!((boundary_average(&five, Face::XMax) - 5.0).abs() < 1e-15);
        let x = ScalarField::from_fn(grid.clone(), |p| p[0]).unwrap();
        assert!((boundary_average(&x, Face::XMax) - 1.0).abs() < 1e-15);
        let y = ScalarField::from_fn(grid, |p| p[1]).unwrap();
        assert!((boundary_average(&y, Face::XMax) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn estimator_exact_for_constant_field() {
        for dim in [2, 3] {
            let field = iso_field(dim, 4, 5.0);
            for m in [0.01, 1.0, 100.0] {
                let bc = EstimationBc::new(1.0, 0.0, m).unwrap();
                let d = estimate_effective_diffusivity(&field, &bc, &SolverConfig::default()).unwrap();
                assert!((d - 5.0).abs() / 5.0 < 1e-8, "dim {dim} M {m}: {d}");
            }
        }
    }

    #[test]
    fn degenerate_gradient_is_reported() {
        let field = iso_field(2, 2, 1.0);
        let bc = EstimationBc::new(0.0, 0.0, 1.0).unwrap();
        assert_eq!(
            estimate_effective_diffusivity(&field, &bc, &SolverConfig::default()),
            Err(SolveError::DegenerateGradient)
        );
    }

    #[test]
    fn fluxes_balance() {
        let t = SymTensor::from_rows(&[&[3.0, 0.4], &[0.4, 1.0]]).unwrap();
        let grid = StructuredGrid::unit(2, 10).unwrap();
        let field = TensorField::uniform(grid, t).unwrap();
        let bc = EstimationBc::new(1.0, 0.1, 2.0).unwrap();
        let u = solve_stationary_bvp(&field, &bc, &SolverConfig::with_tolerance(1e-13)).unwrap();
        let (inflow, outflow) = boundary_fluxes(&field, &bc, &u).unwrap();
        assert!((inflow - outflow).abs() < 1e-9 * outflow.abs(), "{inflow} vs {outflow}");
    }

    #[test]
    fn non_convergence_carries_residual() {
        let field = iso_field(2, 16, 1.0);
        let bc = EstimationBc::new(1.0, 0.0, 1.0).unwrap();
        let cfg = SolverConfig { rel_tol: 1e-12, max_iter: Some(2) };
        match solve_stationary_bvp(&field, &bc, &cfg) {
            Err(SolveError::NotConverged { iterations: 2, relative_residual }) => {
                assert!(relative_residual > 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
