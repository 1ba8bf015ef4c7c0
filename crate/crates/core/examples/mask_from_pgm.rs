//! Round trip of a phase mask through a PGM file, followed by an estimate on
//! the ingested grid.
//!
//! Run with `cargo run --release --example mask_from_pgm [path.pgm]`. Without a
//! path a synthetic mask is written to the temporary directory first.

use std::path::PathBuf;

use effdiff::experiments::{write_pgm, MaskReadOptions};
use effdiff::grid::estimate_report;
use effdiff::{ingest_mask, read_mask, synth_layered_mask, EstimationBc, SolverConfig, SymTensor, SynthLayerSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = match std::env::args().nth(1) {
        Some(p) => PathBuf::from(p),
        None => {
            let path = std::env::temp_dir().join("effdiff_layers.pgm");
            let mut spec = SynthLayerSpec::perfect(0.1861, 5, 200, 60, 1.0);
            spec.wobble = 0.1;
            spec.gap_density = 0.5;
            spec.seed = 11;
            write_pgm(&synth_layered_mask(&spec)?, &path, true)?;
            path
        }
    };

    let raw = read_mask(&path, &MaskReadOptions::default())?;
    for w in &raw.warnings {
        eprintln!("warning: {w}");
    }
    let lx = 4.39e-7;
    let mask = effdiff::PhaseMask::new(raw.width(), raw.height(), raw.labels().to_vec(), lx / raw.width() as f64)?;
    println!("{}: {}x{} pixels, lipid fraction {:.4}", path.display(), mask.width(), mask.height(), mask.lipid_fraction());

    let d1 = SymTensor::isotropic(2, 1.0e-14)?;
    let d2 = SymTensor::diagonal(&[1.0e-12, 1.0e-10])?;
    for kp in [1.0, 1.26e-2] {
        let field = ingest_mask(&mask, &d1, &d2, kp)?;
        let bc = EstimationBc::new(1.0, 0.0, 0.5 * 1.2e-14 / lx)?;
        let r = estimate_report(&field, &bc, &SolverConfig::default())?;
        println!("K_p = {kp:<8} d_eff = {:.4e}  u_out = {:.4}", r.d_eff, r.u_out);
    }
    Ok(())
}
