use super::ExperimentError;
use crate::grid::{
    solve_transient, BoundarySetup, FluxHistory, ScalarField, SolverConfig, TensorField,
    TransientSettings,
};
use crate::tensor::SymTensor;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialCondition {
    Zero,
    /// `amplitude · exp(−sharpness · (x / length)²)`
    Gaussian { amplitude: f64, sharpness: f64, length: f64 },
}

impl InitialCondition {
    pub fn evaluate(&self, x: f64) -> f64 {
        match *self {
            InitialCondition::Zero => 0.0,
            InitialCondition::Gaussian { amplitude, sharpness, length } => {
                amplitude * (-sharpness * (x / length).powi(2)).exp()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComparisonSettings {
    pub initial: InitialCondition,
    pub bc: BoundarySetup,
    pub time: TransientSettings,
    pub solver: SolverConfig,
}

/// Outlet flux histories of a detailed and a homogenized run.
#[derive(Clone, Debug, PartialEq)]
pub struct TransientComparison {
    pub detailed: FluxHistory,
    pub homogenized: FluxHistory,
    /// `‖N_detailed − N_hom‖₂ / ‖N_hom‖₂` over the sample times.
    pub rel_l2: f64,
    pub max_abs: f64,
    /// `max |N_detailed − N_hom| / max |N_hom|`.
    pub rel_max: f64,
}

/// Runs the same transient on `detailed` and on its homogenized counterpart:
/// isotropic `d_eff` with the volume-averaged capacity and reaction rate.
pub fn transient_comparison(
    detailed: &TensorField,
    d_eff: f64,
    settings: &ComparisonSettings,
) -> Result<TransientComparison, ExperimentError> {
    if !(d_eff > 0.0 && d_eff.is_finite()) {
        return Err(ExperimentError::Config("effective diffusivity must be positive".into()));
    }
    let grid = detailed.grid().clone();
    let cells = grid.cell_count();
    let mut homogenized = TensorField::uniform(grid.clone(), SymTensor::isotropic(grid.dim(), d_eff)?)?
        .with_sigma(vec![detailed.mean_sigma(); cells])?;
    if detailed.has_reaction() {
        homogenized = homogenized.with_reaction(vec![detailed.mean_reaction(); cells])?;
    }
    let initial = ScalarField::from_fn(grid, |p| settings.initial.evaluate(p[0]))?;
    let run_d = solve_transient(detailed, &initial, &settings.bc, &settings.time, &settings.solver)?;
    let run_h = solve_transient(&homogenized, &initial, &settings.bc, &settings.time, &settings.solver)?;

    let (mut diff2, mut ref2, mut max_abs, mut ref_max) = (0.0, 0.0, 0.0f64, 0.0f64);
    for (a, b) in run_d.history.flux.iter().zip(&run_h.history.flux) {
        let d = a - b;
        diff2 += d * d;
        ref2 += b * b;
        max_abs = max_abs.max(d.abs());
        ref_max = ref_max.max(b.abs());
    }
    let ratio = |num: f64, den: f64| if num == 0.0 { 0.0 } else { num / den };
    Ok(TransientComparison {
        rel_l2: ratio(diff2.sqrt(), ref2.sqrt()),
        rel_max: ratio(max_abs, ref_max),
        max_abs,
        detailed: run_d.history,
        homogenized: run_h.history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{EstimationBc, StructuredGrid};

    fn settings(initial: InitialCondition, bc: EstimationBc) -> ComparisonSettings {
        ComparisonSettings {
            initial,
            bc: bc.into(),
            time: TransientSettings { t_end: 0.2, dt: 0.01 },
            solver: SolverConfig::with_tolerance(1e-12),
        }
    }

    #[test]
    fn identical_problems_agree() {
        let grid = StructuredGrid::unit(2, 8).unwrap();
        let field = TensorField::uniform(grid, SymTensor::isotropic(2, 2.0).unwrap()).unwrap();
        let s = settings(
            InitialCondition::Gaussian { amplitude: 1.0, sharpness: 10.0, length: 1.0 },
            EstimationBc::new(1.0, 0.0, 1.0).unwrap(),
        );
        let c = transient_comparison(&field, 2.0, &s).unwrap();
        assert!(c.rel_l2 <= 1e-10, "{}", c.rel_l2);
        assert!(c.max_abs <= 1e-10);
    }

    #[test]
    fn zero_data_gives_zero_histories() {
        let grid = StructuredGrid::unit(2, 4).unwrap();
        let field = TensorField::uniform(grid, SymTensor::diagonal(&[1.0, 3.0]).unwrap()).unwrap();
        let s = settings(InitialCondition::Zero, EstimationBc::new(0.0, 0.0, 1.0).unwrap());
        let c = transient_comparison(&field, 1.5, &s).unwrap();
        assert!(c.detailed.flux.iter().chain(&c.homogenized.flux).all(|f| *f == 0.0));
        assert_eq!(c.rel_l2, 0.0);
    }

    #[test]
    fn rejects_bad_diffusivity() {
        let grid = StructuredGrid::unit(2, 2).unwrap();
        let field = TensorField::uniform(grid, SymTensor::isotropic(2, 1.0).unwrap()).unwrap();
        let s = settings(InitialCondition::Zero, EstimationBc::new(1.0, 0.0, 1.0).unwrap());
        assert!(transient_comparison(&field, 0.0, &s).is_err());
    }
}
