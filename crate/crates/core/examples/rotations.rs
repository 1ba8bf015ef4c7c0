//! Haar-uniform rotations and rotated diffusion tensors.
//!
//! Run with `cargo run --example rotations`.

use effdiff::tensor::Rotation;
use effdiff::{rotate_tensor, sample_rotation_3d, SymTensor};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let q = SymTensor::diagonal(&[9.0, 25.0, 1.0])?;

    let r = sample_rotation_3d(&mut rng);
    let (alpha, beta, gamma) = r.angles();
    let t = rotate_tensor(&r.matrix(), &q)?;
    println!("angles ({alpha:.3}, {beta:.3}, {gamma:.3})");
    println!("T Q T^T = {t}");
    println!("trace {:.12} det {:.12}\n", t.trace(), t.det());

    // E[T Q T^T] approaches tr(Q)/3 times the identity
    let count = 20_000;
    let mut mean = [[0.0; 3]; 3];
    for _ in 0..count {
        let t = rotate_tensor(&Rotation::sample(3, &mut rng).matrix(), &q)?;
        for (i, row) in mean.iter_mut().enumerate() {
            for (j, m) in row.iter_mut().enumerate() {
                *m += t.get(i, j) / count as f64;
            }
        }
    }
    println!("mean over {count} rotations (expect {:.3} on the diagonal):", q.trace() / 3.0);
    for row in mean {
        println!("  {:>8.3} {:>8.3} {:>8.3}", row[0], row[1], row[2]);
    }
    Ok(())
}
