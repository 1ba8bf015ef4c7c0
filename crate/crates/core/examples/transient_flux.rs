//! Outlet flux histories of a layered membrane stack and of its homogenized
//! counterpart.
//!
//! Run with `cargo run --release --example transient_flux`.

use effdiff::experiments::{ComparisonSettings, InitialCondition};
use effdiff::grid::{estimate_report, TransientSettings};
use effdiff::{ingest_mask, synth_layered_mask, transient_comparison, EstimationBc, SolverConfig, SymTensor, SynthLayerSpec};

const LX: f64 = 4.359e-7;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d1 = SymTensor::isotropic(2, 1.0e-14)?;
    let d2 = SymTensor::diagonal(&[1.0e-12, 1.0e-10])?;
    let mask = synth_layered_mask(&SynthLayerSpec::perfect(0.1878, 4, 128, 16, LX / 128.0))?;

    for kp in [1.0, 1.26e-2] {
        let field = ingest_mask(&mask, &d1, &d2, kp)?;
        let bc = EstimationBc::new(1.0e-6, 0.0, 0.5 * 1.23e-14 / LX)?;
        let solver = SolverConfig::default();
        let d_eff = estimate_report(&field, &bc, &solver)?.d_eff;
        let t_end = LX * LX * field.mean_sigma() / d_eff;
        let settings = ComparisonSettings {
            initial: InitialCondition::Gaussian { amplitude: 1.0e-6, sharpness: 1000.0, length: 2.179e-7 },
            bc: bc.into(),
            time: TransientSettings { t_end, dt: t_end / 100.0 },
            solver,
        };
        let c = transient_comparison(&field, d_eff, &settings)?;
        println!("K_p = {kp}: d_eff {d_eff:.4e}, relative L2 {:.3e}, relative max {:.3e}", c.rel_l2, c.rel_max);
        println!("{:>12} {:>14} {:>14}", "t", "detailed", "homogenized");
        for i in (0..c.detailed.len()).step_by(20) {
            println!("{:>12.4e} {:>14.6e} {:>14.6e}", c.detailed.times[i], c.detailed.flux[i], c.homogenized.flux[i]);
        }
        println!();
    }
    Ok(())
}
