use std::fs::File;
use std::io::{BufWriter, Write};

use super::{CliError, Command, RunConfig};
use crate::experiments::{
    build_random_field, geometric_mean_reference, ingest_mask, monte_carlo_with_threads, read_mask,
    synth_layered_mask, transient_comparison, ComparisonSettings, InitialCondition, MaskReadOptions,
    McConfig, PhaseMask, SynthLayerSpec,
};
use crate::grid::{
    estimate_report, solve_cell_problem, EstimationBc, SolverConfig, StructuredGrid, TensorField,
    TransientSettings,
};
use crate::tensor::{harmonic_mean_profile, layered_effective_tensor, LayeredMedium, SymTensor};

/// Executes a parsed invocation.
pub fn run(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    if config.verbosity > 0 {
        for (k, v) in config.resolved_pairs() {
            let _ = writeln!(stderr, "# {k}={v}");
        }
    }
    match config.command {
        Command::Layered => layered(config, stdout),
        Command::Estimate => estimate(config, stdout, stderr),
        Command::Cellprob => cellprob(config, stdout),
        Command::Mc2d | Command::Mc3d => campaign(config, stdout),
        Command::Transient => transient(config, stdout, stderr),
    }
}

fn stdout_err(source: std::io::Error) -> CliError {
    CliError::Io { path: "<stdout>".into(), source }
}

fn solver(config: &RunConfig) -> SolverConfig {
    SolverConfig { rel_tol: config.real("tol"), max_iter: config.opt_count("max_iter") }
}

fn write_artifact(
    config: &RunConfig,
    extra: &[(String, String)],
    body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<(), CliError> {
    let Some(path) = &config.out else { return Ok(()) };
    let io_err = |source| CliError::Io { path: path.clone(), source };
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    let result = (|| {
        for (k, v) in config.resolved_pairs().iter().chain(extra) {
            writeln!(w, "# {k}={v}")?;
        }
        body(&mut w)?;
        w.flush()
    })();
    result.map_err(io_err)
}

fn layered(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let d2n = config.real("d2n");
    let medium = LayeredMedium::from_fraction(
        config.real("p1"),
        iso(config.real("d1")),
        diag(d2n, config.opt_real("d2t").unwrap_or(d2n)),
        config.real("kp"),
        0,
    );
    let t = layered_effective_tensor(&medium)?;
    (|| {
        writeln!(stdout, "normal     {:.4e}", t.get(0, 0))?;
        writeln!(stdout, "tangential {:.4e}", t.get(1, 1))
    })()
    .map_err(stdout_err)?;
    write_artifact(config, &[], |w| {
        writeln!(w, "component,value")?;
        writeln!(w, "normal,{}", t.get(0, 0))?;
        writeln!(w, "tangential,{}", t.get(1, 1))
    })
}

fn iso(d: f64) -> SymTensor {
    SymTensor::isotropic(2, d).expect("validated positive")
}

fn diag(a: f64, b: f64) -> SymTensor {
    SymTensor::diagonal(&[a, b]).expect("validated positive")
}

/// Phase mask from `--mask` or the synthetic layer keys, with its physical
/// length along x set to `lx`.
fn load_mask(config: &RunConfig, stderr: &mut dyn Write) -> Result<PhaseMask, CliError> {
    let lx = config.real("lx");
    let mask = match config.path("mask") {
        Some(path) => {
            let probe = read_mask(path, &MaskReadOptions { threshold: config.opt_real("threshold"), pixel_size: 1.0 })?;
            let pixel = lx / probe.width() as f64;
            let mut mask = PhaseMask::new(probe.width(), probe.height(), probe.labels().to_vec(), pixel)?;
            mask.warnings = probe.warnings;
            mask
        }
        None => {
            let width = config.count("width");
            synth_layered_mask(&SynthLayerSpec {
                lipid_fraction: config.real("p2"),
                layers: config.count("layers"),
                wobble: config.real("wobble"),
                gap_density: config.real("gaps"),
                width,
                height: config.count("height"),
                pixel_size: lx / width as f64,
                seed: config.seed("mask_seed"),
            })?
        }
    };
    for w in &mask.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    Ok(mask)
}

/// Harmonic mean normal to the layers at the realized lipid fraction.
fn layered_reference(config: &RunConfig, mask: &PhaseMask) -> Result<f64, CliError> {
    let p2 = mask.lipid_fraction();
    let d1 = config.real("d1");
    let d2 = config.real("d2n") / config.real("kp");
    let segments: Vec<(f64, f64)> = [(1.0 - p2, d1), (p2, d2)].into_iter().filter(|s| s.0 > 0.0).collect();
    Ok(harmonic_mean_profile(&segments)?)
}

fn boundary(config: &RunConfig, d_ref: f64, length: f64) -> Result<EstimationBc, CliError> {
    let m = config.opt_real("mass_transfer").unwrap_or(0.5 * d_ref / length);
    Ok(EstimationBc::new(config.real("c0"), config.real("c1"), m)?)
}

fn mask_field(config: &RunConfig, mask: &PhaseMask) -> Result<TensorField, CliError> {
    let d1 = iso(config.real("d1"));
    let d2 = diag(config.real("d2n"), config.real("d2t"));
    Ok(ingest_mask(mask, &d1, &d2, config.real("kp"))?)
}

fn estimate(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let mask = load_mask(config, stderr)?;
    let field = mask_field(config, &mask)?;
    let reference = layered_reference(config, &mask)?;
    let bc = boundary(config, reference, mask.extent().0)?;
    let report = estimate_report(&field, &bc, &solver(config))?;
    let rel = (report.d_eff - reference) / reference;
    (|| {
        writeln!(stdout, "lipid fraction  {:.4}", mask.lipid_fraction())?;
        writeln!(stdout, "d_eff           {:.4e}", report.d_eff)?;
        writeln!(stdout, "harmonic mean   {:.4e}", reference)?;
        writeln!(stdout, "relative diff   {:+.2}%", 100.0 * rel)?;
        writeln!(stdout, "outlet mean     {:.4}", report.u_out)
    })()
    .map_err(stdout_err)?;
    let extra = [("mass_transfer_used".to_string(), bc.mass_transfer.to_string())];
    write_artifact(config, &extra, |w| {
        writeln!(w, "lipid_fraction,d_eff,harmonic_mean,relative_diff,u_out,n_average")?;
        writeln!(
            w,
            "{},{},{},{},{},{}",
            mask.lipid_fraction(),
            report.d_eff,
            reference,
            rel,
            report.u_out,
            report.n_average
        )
    })
}

fn cellprob(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cells = config.count("cells");
    let (field, reference) = match config.text("geometry") {
        "layered" => {
            let n1 = (config.real("p1") * cells as f64).round() as usize;
            if n1 == 0 || n1 == cells {
                return Err(CliError::Usage(format!("--cells {cells} cannot resolve both phases")));
            }
            let grid = StructuredGrid::new(&[1.0, 1.0], &[cells, 2])?;
            let d1 = iso(config.real("d1"));
            let kp = config.real("kp");
            let d2 = diag(config.real("d2n") / kp, config.real("d2t") / kp);
            let tensors = (0..grid.cell_count())
                .map(|c| if grid.cell_coords(c)[0] < n1 { d1 } else { d2 })
                .collect();
            let p1 = n1 as f64 / cells as f64;
            let medium = LayeredMedium::from_fraction(p1, d1, d2, 1.0, 0);
            (TensorField::new(grid, tensors)?, Some(layered_effective_tensor(&medium)?))
        }
        "checkerboard" => {
            if cells % 2 != 0 {
                return Err(CliError::Usage("--cells must be even for the checkerboard".into()));
            }
            let grid = StructuredGrid::unit(2, cells)?;
            let (a, b) = (iso(config.real("a")), iso(config.real("b")));
            let half = cells / 2;
            let tensors = (0..grid.cell_count())
                .map(|c| {
                    let ij = grid.cell_coords(c);
                    if (ij[0] < half) == (ij[1] < half) { a } else { b }
                })
                .collect();
            (TensorField::new(grid, tensors)?, None)
        }
        _ => {
            let mut mc = McConfig::new(config.reals("q"), config.count("n"), 1, config.seed("seed"))?;
            mc.refinement = cells;
            let field = build_random_field(&mc, config.seed("trial") as usize)?;
            (field, None)
        }
    };
    let solution = solve_cell_problem(&field, &solver(config))?;
    let t = solution.effective;
    let dim = t.dim();
    (|| {
        writeln!(stdout, "effective tensor")?;
        for i in 0..dim {
            let row: Vec<String> = (0..dim).map(|j| format!("{:>12.5e}", t.get(i, j))).collect();
            writeln!(stdout, "  {}", row.join(" "))?;
        }
        if let Some(r) = &reference {
            let dev = (0..dim)
                .map(|i| ((t.get(i, i) - r.get(i, i)) / r.get(i, i)).abs())
                .fold(0.0, f64::max);
            writeln!(stdout, "closed form diagonal {:?}", r.diag())?;
            writeln!(stdout, "max relative deviation {dev:.3e}")?;
        }
        Ok(())
    })()
    .map_err(stdout_err)?;
    write_artifact(config, &[], |w| {
        writeln!(w, "i,j,effective,closed_form")?;
        for i in 0..dim {
            for j in 0..dim {
                let r = reference.as_ref().map_or(String::new(), |r| r.get(i, j).to_string());
                writeln!(w, "{i},{j},{},{r}", t.get(i, j))?;
            }
        }
        Ok(())
    })
}

fn campaign(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut mc = McConfig::new(config.reals("q"), config.count("n"), config.count("trials"), config.seed("seed"))?;
    if let Some(m) = config.opt_count("refinement") {
        mc.refinement = m;
    }
    let m = config.opt_real("mass_transfer").unwrap_or(mc.bc.mass_transfer);
    mc.bc = EstimationBc::new(config.real("c0"), config.real("c1"), m)?;
    mc.solver = solver(config);
    let stats = monte_carlo_with_threads(&mc, config.threads)?;
    let reference = if mc.dim == 2 { Some(geometric_mean_reference(&mc.q)?) } else { None };
    (|| {
        if config.verbosity > 1 {
            for t in &stats.trials {
                writeln!(stdout, "trial {:>4}  seed {:>20}  d_eff {:.6}", t.index, t.seed, t.d_eff)?;
            }
        }
        writeln!(stdout, "trials {}", stats.trials.len())?;
        writeln!(stdout, "mean {}", stats.mean)?;
        writeln!(stdout, "std {}", stats.std_dev)?;
        writeln!(stdout, "std error {}", stats.std_error)?;
        writeln!(stdout, "mean ± std: {:.4} ± {:.4}", stats.mean, stats.std_dev)?;
        if let Some(r) = reference {
            writeln!(stdout, "reference sqrt(det Q) {r:.4}, abs error {:.4}", stats.abs_error(r))?;
        }
        Ok(())
    })()
    .map_err(stdout_err)?;

    let Some(path) = &config.out else { return Ok(()) };
    let io_err = |source| CliError::Io { path: path.to_path_buf(), source };
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    let extra = [("command".to_string(), config.command.name().to_string())];
    stats.write_csv(&mut w, &extra).and_then(|_| w.flush()).map_err(io_err)
}

fn transient(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let mask = load_mask(config, stderr)?;
    let field = mask_field(config, &mask)?;
    let length = mask.extent().0;
    let reference = layered_reference(config, &mask)?;
    let bc = boundary(config, reference, length)?;
    let d_eff = match config.opt_real("d_eff") {
        Some(d) => d,
        None => estimate_report(&field, &bc, &solver(config))?.d_eff,
    };
    let t_end = config.opt_real("t_end").unwrap_or(length * length * field.mean_sigma() / d_eff);
    let settings = ComparisonSettings {
        initial: InitialCondition::Gaussian {
            amplitude: config.real("amplitude"),
            sharpness: config.real("sharpness"),
            length: config.real("bump_length"),
        },
        bc: bc.into(),
        time: TransientSettings { t_end, dt: t_end / config.count("steps") as f64 },
        solver: solver(config),
    };
    let c = transient_comparison(&field, d_eff, &settings)?;
    (|| {
        writeln!(stdout, "homogenized d_eff   {d_eff:.4e}")?;
        writeln!(stdout, "t_end               {t_end:.4e}")?;
        writeln!(stdout, "relative L2 diff    {:.4e}", c.rel_l2)?;
        writeln!(stdout, "relative max diff   {:.4e}", c.rel_max)
    })()
    .map_err(stdout_err)?;
    write_artifact(config, &[("t_end_used".into(), t_end.to_string())], |w| {
        writeln!(w, "time,detailed_flux,homogenized_flux")?;
        for ((t, a), b) in c.detailed.times.iter().zip(&c.detailed.flux).zip(&c.homogenized.flux) {
            writeln!(w, "{t},{a},{b}")?;
        }
        Ok(())
    })
}
