//! Monte Carlo estimation in 2D, where the exact limit is the geometric mean
//! of the eigenvalues.
//!
//! Run with `cargo run --release --example monte_carlo_2d [N] [trials] [refinement]`.

use effdiff::{geometric_mean_reference, monte_carlo, McConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let arg = |i: usize, default: usize| std::env::args().nth(i).map_or(Ok(default), |s| s.parse());
    let (n, trials, m) = (arg(1, 20)?, arg(2, 30)?, arg(3, 3)?);

    let mut config = McConfig::new(&[1.0, 10.0], n, trials, 42)?;
    config.refinement = m;
    let stats = monte_carlo(&config)?;
    let exact = geometric_mean_reference(&config.q)?;

    println!("N = {n}, {trials} trials, {m}x{m} elements per sub-cell");
    println!("mean   {:.4}", stats.mean);
    println!("std    {:.4}", stats.std_dev);
    println!("se     {:.4}", stats.std_error);
    println!("exact  {exact:.4}  (abs error {:.4})", stats.abs_error(exact));
    stats.write_csv(std::io::stdout().lock(), &[])?;
    Ok(())
}
