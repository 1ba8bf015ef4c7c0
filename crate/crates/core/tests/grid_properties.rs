use effdiff::grid::{
    boundary_fluxes, capacity_mass, estimate_report, solve_cell_problem, solve_stationary_bvp, solve_transient,
    BoundarySetup, EstimationBc, ScalarField, SolverConfig, StructuredGrid, TensorField, TransientSettings,
};
use effdiff::tensor::{layered_effective_tensor, rotate_tensor, LayeredMedium, Rotation, SymTensor};
use effdiff::{build_random_field, estimate_effective_diffusivity, McConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Random piecewise-constant field with rotated anisotropic tensors.
fn random_field(dim: usize, cells: usize, seed: u64) -> TensorField {
    let grid = StructuredGrid::unit(dim, cells).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tensors = (0..grid.cell_count())
        .map(|_| {
            let diag: Vec<f64> = (0..dim).map(|_| rng.random_range(0.5..5.0)).collect();
            let q = SymTensor::diagonal(&diag).unwrap();
            rotate_tensor(&Rotation::sample(dim, &mut rng).matrix(), &q).unwrap()
        })
        .collect();
    TensorField::new(grid, tensors).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn estimator_is_exact_for_constant_fields(
        d in prop::array::uniform3(1e-2f64..1e2),
        cross in -0.4f64..0.4,
        log_m in -3.0f64..3.0,
        three_d in any::<bool>(),
    ) {
        let (dim, tensor) = if three_d {
            // x-row off-diagonals vanish; the y–z coupling may not
            let c = cross * (d[1] * d[2]).sqrt();
            (3, SymTensor::from_rows(&[&[d[0], 0.0, 0.0], &[0.0, d[1], c], &[0.0, c, d[2]]]).unwrap())
        } else {
            (2, SymTensor::diagonal(&d[..2]).unwrap())
        };
        let cells = if three_d { 5 } else { 9 };
        let grid = StructuredGrid::new(&[2.0, 1.0, 1.5][..dim], &vec![cells; dim]).unwrap();
        let field = TensorField::uniform(grid, tensor).unwrap();
        let m = 10f64.powf(log_m) * d[0] / 2.0;
        let bc = EstimationBc::new(1.0, 0.0, m).unwrap();
        let est = estimate_effective_diffusivity(&field, &bc, &SolverConfig::with_tolerance(1e-13)).unwrap();
        prop_assert!(rel(est, d[0]) < 1e-8, "{est} vs {}", d[0]);
    }

    #[test]
    fn estimator_scales_with_the_medium(seed in any::<u64>(), lambda in 0.1f64..10.0, mu in 0.1f64..10.0) {
        let field = random_field(2, 6, seed);
        let scaled = TensorField::new(
            field.grid().clone(),
            field.tensors().iter().map(|t| t.scaled(lambda).unwrap()).collect(),
        ).unwrap();
        let cfg = SolverConfig::with_tolerance(1e-13);
        let bc = EstimationBc::new(1.0, 0.2, 1.3).unwrap();
        let base = estimate_effective_diffusivity(&field, &bc, &cfg).unwrap();
        let bc_scaled = EstimationBc::new(mu, 0.2 * mu, 1.3 * lambda).unwrap();
        let est = estimate_effective_diffusivity(&scaled, &bc_scaled, &cfg).unwrap();
        prop_assert!(rel(est, lambda * base) < 1e-10, "{est} vs {}", lambda * base);
    }

    #[test]
    fn isotropic_solutions_obey_the_maximum_principle(seed in any::<u64>(), c1 in -1.0f64..1.0, three_d in any::<bool>()) {
        let dim = if three_d { 3 } else { 2 };
        let cells = if three_d { 5 } else { 10 };
        let grid = StructuredGrid::unit(dim, cells).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tensors = (0..grid.cell_count())
            .map(|_| SymTensor::isotropic(dim, rng.random_range(0.1..10.0)).unwrap())
            .collect();
        let field = TensorField::new(grid, tensors).unwrap();
        let bc = EstimationBc::new(1.0, c1, 2.0).unwrap();
        let u = solve_stationary_bvp(&field, &bc, &SolverConfig::with_tolerance(1e-13)).unwrap();
        for v in u.values() {
            prop_assert!(*v <= 1.0 + 1e-10 && *v >= c1 - 1e-10, "{v}");
        }
    }
}

#[test]
fn two_slab_solution_matches_transmission_profile() {
    // slab a on [0, 0.75), slab b on [0.75, 1.5]; flux q through both and the Robin face
    let (da, db, m, c0, c1) = (2.0, 0.5, 0.8, 1.0, 0.1);
    let grid = StructuredGrid::new(&[1.5, 0.5], &[12, 3]).unwrap();
    let tensors = (0..grid.cell_count())
        .map(|c| SymTensor::isotropic(2, if grid.cell_coords(c)[0] < 6 { da } else { db }).unwrap())
        .collect();
    let field = TensorField::new(grid.clone(), tensors).unwrap();
    let bc = EstimationBc::new(c0, c1, m).unwrap();
    let u = solve_stationary_bvp(&field, &bc, &SolverConfig::with_tolerance(1e-14)).unwrap();

    let q = (c0 - c1) / (0.75 / da + 0.75 / db + 1.0 / m);
    let exact = |x: f64| {
        if x <= 0.75 {
            c0 - q * x / da
        } else {
            c0 - q * 0.75 / da - q * (x - 0.75) / db
        }
    };
    for (node, v) in u.values().iter().enumerate() {
        let x = grid.node_position(node, false)[0];
        assert!((v - exact(x)).abs() < 1e-10, "x = {x}: {v} vs {}", exact(x));
    }
}

#[test]
fn steady_fluxes_balance() {
    for dim in [2, 3] {
        let field = random_field(dim, if dim == 2 { 12 } else { 5 }, 3);
        let bc = EstimationBc::new(1.0, 0.0, 1.5).unwrap();
        let u = solve_stationary_bvp(&field, &bc, &SolverConfig::with_tolerance(1e-13)).unwrap();
        let (inflow, outflow) = boundary_fluxes(&field, &bc, &u).unwrap();
        assert!(rel(inflow, outflow) < 1e-9, "{inflow} vs {outflow}");
    }
}

#[test]
fn random_realization_lands_in_the_plausible_band() {
    let config = McConfig::new(&[1.0, 10.0], 20, 1, 2024).unwrap();
    let field = build_random_field(&config, 0).unwrap();
    for t in field.tensors() {
        let (a, b, c) = (t.get(0, 0), t.get(1, 1), t.get(0, 1));
        // eigenvalues of a 2×2 block by the quadratic formula
        let mean = 0.5 * (a + b);
        let radius = (0.25 * (a - b).powi(2) + c * c).sqrt();
        assert!((mean - radius - 1.0).abs() < 1e-12 && (mean + radius - 10.0).abs() < 1e-12);
        assert!((a * b - c * c - 10.0).abs() < 1e-12);
    }
    let d = estimate_effective_diffusivity(&field, &config.bc, &config.solver).unwrap();
    assert!((2.7..=3.7).contains(&d), "{d}");
}

fn layered_field(dims: &[usize], normal: usize, split: usize, d1: SymTensor, d2: SymTensor) -> TensorField {
    let extent: Vec<f64> = dims.iter().map(|_| 1.0).collect();
    let grid = StructuredGrid::new(&extent, dims).unwrap();
    let tensors = (0..grid.cell_count())
        .map(|c| if grid.cell_coords(c)[normal] < split { d1 } else { d2 })
        .collect();
    TensorField::new(grid, tensors).unwrap()
}

#[test]
fn cell_problem_reproduces_layered_closed_form() {
    let cfg = SolverConfig::with_tolerance(1e-13);
    // 2D, layers normal to x
    let d1 = SymTensor::isotropic(2, 1e-14).unwrap();
    let d2 = SymTensor::diagonal(&[1e-12, 1e-10]).unwrap();
    let field = layered_field(&[16, 4], 0, 13, d1, d2);
    let cell = solve_cell_problem(&field, &cfg).unwrap().effective;
    let exact = layered_effective_tensor(&LayeredMedium::from_fraction(13.0 / 16.0, d1, d2, 1.0, 0)).unwrap();
    for i in 0..2 {
        assert!(rel(cell.get(i, i), exact.get(i, i)) < 1e-8);
    }
    assert!(cell.get(0, 1).abs() < 1e-8 * exact.get(0, 0));

    // 3D, layers normal to the second axis
    let d1 = SymTensor::diagonal(&[1.0, 2.0, 3.0]).unwrap();
    let d2 = SymTensor::diagonal(&[10.0, 0.1, 5.0]).unwrap();
    let field = layered_field(&[3, 8, 3], 1, 3, d1, d2);
    let cell = solve_cell_problem(&field, &cfg).unwrap().effective;
    let exact = layered_effective_tensor(&LayeredMedium::from_fraction(3.0 / 8.0, d1, d2, 1.0, 1)).unwrap();
    for i in 0..3 {
        assert!(rel(cell.get(i, i), exact.get(i, i)) < 1e-8, "axis {i}");
    }
}

/// Aitken's Δ² limit of three successive refinements.
fn aitken(a: f64, b: f64, c: f64) -> f64 {
    c - (c - b).powi(2) / ((c - b) - (b - a))
}

fn checkerboard(cells: usize) -> f64 {
    let grid = StructuredGrid::unit(2, cells).unwrap();
    let half = cells / 2;
    let tensors = (0..grid.cell_count())
        .map(|c| {
            let ij = grid.cell_coords(c);
            SymTensor::isotropic(2, if (ij[0] < half) == (ij[1] < half) { 1.0 } else { 4.0 }).unwrap()
        })
        .collect();
    let field = TensorField::new(grid, tensors).unwrap();
    let t = solve_cell_problem(&field, &SolverConfig::with_tolerance(1e-12)).unwrap().effective;
    assert!((t.get(0, 0) - t.get(1, 1)).abs() < 1e-9);
    t.get(0, 0)
}

#[test]
fn checkerboard_extrapolates_to_the_geometric_mean() {
    let seq: Vec<f64> = [16, 32, 64].into_iter().map(checkerboard).collect();
    // monotone approach from above
    assert!(seq[0] > seq[1] && seq[1] > seq[2] && seq[2] > 2.0);
    let limit = aitken(seq[0], seq[1], seq[2]);
    assert!(rel(limit, 2.0) < 0.01, "{limit}");
}

#[test]
fn insulated_transient_conserves_capacity_mass() {
    let base = random_field(2, 12, 8);
    let cells = base.grid().cell_count();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let sigma: Vec<f64> = (0..cells).map(|_| rng.random_range(0.5..80.0)).collect();
    let field = base.with_sigma(sigma).unwrap();
    let initial = ScalarField::from_fn(field.grid().clone(), |p| (-20.0 * (p[0] - 0.3).powi(2)).exp() + p[1]).unwrap();
    let run = solve_transient(
        &field,
        &initial,
        &BoundarySetup::insulated(),
        &TransientSettings { t_end: 1.0, dt: 0.02 },
        &SolverConfig::with_tolerance(1e-13),
    )
    .unwrap();
    let m0 = capacity_mass(&field, &initial);
    assert_eq!(run.mass[0], m0);
    for m in &run.mass {
        assert!(rel(*m, m0) < 1e-12, "{m} vs {m0}");
    }
    assert!(rel(capacity_mass(&field, &run.final_state), m0) < 1e-12);
}

#[test]
fn transient_settles_on_the_stationary_flux() {
    let grid = StructuredGrid::unit(2, 10).unwrap();
    let tensors = (0..grid.cell_count())
        .map(|c| SymTensor::isotropic(2, if grid.cell_coords(c)[0] % 3 == 0 { 1.0 } else { 3.0 }).unwrap())
        .collect();
    let sigma = (0..grid.cell_count()).map(|c| if c % 2 == 0 { 1.0 } else { 2.0 }).collect();
    let field = TensorField::new(grid.clone(), tensors).unwrap().with_sigma(sigma).unwrap();
    let bc = EstimationBc::new(1.0, 0.0, 1.0).unwrap();
    let cfg = SolverConfig::with_tolerance(1e-12);
    let stationary = estimate_report(&field, &bc, &cfg).unwrap().n_average;
    // L² max σ / min d = 2
    let run = solve_transient(
        &field,
        &ScalarField::zeros(grid),
        &bc.into(),
        &TransientSettings { t_end: 30.0, dt: 0.1 },
        &cfg,
    )
    .unwrap();
    let tail = *run.history.flux.last().unwrap();
    assert!(rel(tail, stationary) < 1e-3, "{tail} vs {stationary}");
    assert!(run.history.times.windows(2).all(|w| w[1] > w[0]));
}
