//! Stationary estimates on synthetic membrane stacks, from perfect stripes to
//! wobbly stripes with short circuits.
//!
//! Run with `cargo run --release --example estimate_synthetic_layers`.

use effdiff::grid::estimate_report;
use effdiff::tensor::harmonic_mean_profile;
use effdiff::{ingest_mask, synth_layered_mask, EstimationBc, SolverConfig, SymTensor, SynthLayerSpec};

const LX: f64 = 4.359e-7;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d1 = SymTensor::isotropic(2, 1.0e-14)?;
    let d2 = SymTensor::diagonal(&[1.0e-12, 1.0e-10])?;
    let kp = 1.0;
    let width = 256;

    println!("{:<24} {:>8} {:>12} {:>12} {:>9}", "geometry", "p2", "estimate", "harmonic", "diff");
    for (label, wobble, gaps) in [("perfect", 0.0, 0.0), ("wobble 0.2", 0.2, 0.0), ("wobble 0.2, 1 gap", 0.2, 1.0), ("2 gaps per layer", 0.0, 2.0)] {
        let mask = synth_layered_mask(&SynthLayerSpec {
            lipid_fraction: 0.1878,
            layers: 4,
            wobble,
            gap_density: gaps,
            width,
            height: 64,
            pixel_size: LX / width as f64,
            seed: 3,
        })?;
        let p2 = mask.lipid_fraction();
        let reference = harmonic_mean_profile(&[(1.0 - p2, 1.0e-14), (p2, 1.0e-12 / kp)])?;
        let field = ingest_mask(&mask, &d1, &d2, kp)?;
        let bc = EstimationBc::new(1.0, 0.0, 0.5 * reference / LX)?;
        let report = estimate_report(&field, &bc, &SolverConfig::default())?;
        println!(
            "{label:<24} {p2:>8.4} {:>12.4e} {reference:>12.4e} {:>8.2}%",
            report.d_eff,
            100.0 * (report.d_eff - reference) / reference
        );
    }
    Ok(())
}
