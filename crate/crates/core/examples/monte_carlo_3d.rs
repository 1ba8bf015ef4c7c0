//! Monte Carlo estimation in 3D with a dedicated worker pool.
//!
//! Run with `cargo run --release --example monte_carlo_3d [N] [trials] [threads]`.

use effdiff::experiments::monte_carlo_with_threads;
use effdiff::McConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let arg = |i: usize, default: usize| std::env::args().nth(i).map_or(Ok(default), |s| s.parse());
    let (n, trials, threads) = (arg(1, 8)?, arg(2, 10)?, arg(3, 0)?);

    let mut config = McConfig::new(&[9.0, 25.0, 1.0], n, trials, 42)?;
    config.refinement = 3;
    let stats = monte_carlo_with_threads(&config, Some(threads))?;
    for t in &stats.trials {
        println!("trial {:>3}  d_eff {:.4}", t.index, t.d_eff);
    }
    println!("mean {:.4} +- {:.4} (se {:.4})", stats.mean, stats.std_dev, stats.std_error);
    Ok(())
}
