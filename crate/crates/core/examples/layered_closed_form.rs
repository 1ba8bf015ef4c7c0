//! Closed-form effective tensors of perfectly layered membranes.
//!
//! Run with `cargo run --example layered_closed_form`.

use effdiff::tensor::{layered_effective_tensor, transform_partition, TwoPhaseCoefficients};
use effdiff::{LayeredMedium, SymTensor};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d1 = SymTensor::isotropic(2, 1.0e-14)?;
    let d2 = SymTensor::diagonal(&[1.0e-12, 1.0e-10])?;

    println!("{:<6} {:>8} {:>10} {:>12} {:>12}", "case", "p1", "K_p", "normal", "tangential");
    for (name, p1) in [("A", 0.8122), ("B", 0.8139)] {
        for (tag, kp) in [("1", 1.0), ("2", 1.26e-2)] {
            let medium = LayeredMedium::from_fraction(p1, d1, d2, kp, 0);
            let t = layered_effective_tensor(&medium)?;
            println!("{:<6} {p1:>8} {kp:>10} {:>12.4e} {:>12.4e}", format!("{tag}{name}"), t.get(0, 0), t.get(1, 1));
        }
    }

    // the lipid coefficients seen by the single-field problem
    let [aqueous, lipid] = transform_partition(&TwoPhaseCoefficients {
        d1,
        d2,
        r1: 0.0,
        r2: 0.0,
        f1: 0.0,
        f2: 0.0,
        partition_coefficient: 1.26e-2,
    })?;
    println!("\naqueous: d = {}, sigma = {}", aqueous.d, aqueous.sigma);
    println!("lipid:   d = {}, sigma = {:.4}", lipid.d, lipid.sigma);
    Ok(())
}
