//! Periodic cell problems: a layered cell against its closed form, and a
//! checkerboard under refinement.
//!
//! Run with `cargo run --release --example cell_problem`.

use effdiff::{layered_effective_tensor, solve_cell_problem, LayeredMedium, SolverConfig, StructuredGrid, SymTensor, TensorField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = SolverConfig::with_tolerance(1e-12);

    let d1 = SymTensor::isotropic(2, 1.0)?;
    let d2 = SymTensor::diagonal(&[0.05, 20.0])?;
    let grid = StructuredGrid::unit(2, 20)?;
    let tensors = (0..grid.cell_count()).map(|c| if grid.cell_coords(c)[0] < 15 { d1 } else { d2 }).collect();
    let cell = solve_cell_problem(&TensorField::new(grid, tensors)?, &cfg)?;
    let exact = layered_effective_tensor(&LayeredMedium::from_fraction(0.75, d1, d2, 1.0, 0))?;
    println!("layered cell   {}", cell.effective);
    println!("closed form    {exact}\n");

    println!("checkerboard of 1 and 4 (limit 2):");
    for cells in [8, 16, 32, 64, 128] {
        let grid = StructuredGrid::unit(2, cells)?;
        let half = cells / 2;
        let tensors = (0..grid.cell_count())
            .map(|c| {
                let ij = grid.cell_coords(c);
                SymTensor::isotropic(2, if (ij[0] < half) == (ij[1] < half) { 1.0 } else { 4.0 })
            })
            .collect::<Result<_, _>>()?;
        let t = solve_cell_problem(&TensorField::new(grid, tensors)?, &cfg)?.effective;
        println!("  {cells:>4} cells per axis: {:.6}", t.get(0, 0));
    }
    Ok(())
}
