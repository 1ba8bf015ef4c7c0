use super::assembly::lumped_weights;
use super::sparse::pcg;
use super::stationary::{boundary_average, BoundarySystem};
use super::{BoundarySetup, Face, GridError, ScalarField, SolveError, SolverConfig, TensorField};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransientSettings {
    pub t_end: f64,
    pub dt: f64,
}

impl TransientSettings {
    /// Number of backward Euler steps, `round(t_end / dt)`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    fn validate(&self) -> Result<(), GridError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(GridError::TimeStep("dt must be positive"));
        }
        if !(self.t_end >= self.dt && self.t_end.is_finite()) {
            return Err(GridError::TimeStep("t_end must be at least dt"));
        }
        Ok(())
    }
}

/// Mean outlet flux `N_average(t)` sampled at the step times.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxHistory {
    pub times: Vec<f64>,
    pub flux: Vec<f64>,
}

impl FluxHistory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct TransientRun {
    /// Starts at `t = 0` with the flux of the initial state.
    pub history: FluxHistory,
    /// `∫σu` at the same times as `history`.
    pub mass: Vec<f64>,
    pub final_state: ScalarField,
}

/// Capacity-weighted total `∫σu` of a multilinear state.
pub fn capacity_mass(field: &TensorField, u: &ScalarField) -> f64 {
    lumped_weights(field, true, false)
        .iter()
        .zip(u.values())
        .map(|(w, v)| w * v)
        .sum()
}

/// Backward Euler integration of `σ ∂u/∂t − ∇·(d∇u) + r u = f`.
///
/// The capacity and reaction terms use the lumped (row-sum) mass, so the
/// discrete total `∫σu` changes only through boundary fluxes, reaction and
/// source. The operator is assembled once and reused for every step.
pub fn solve_transient(
    field: &TensorField,
    initial: &ScalarField,
    bc: &BoundarySetup,
    settings: &TransientSettings,
    config: &SolverConfig,
) -> Result<TransientRun, SolveError> {
    settings.validate()?;
    if initial.grid() != field.grid() || initial.is_periodic() {
        return Err(GridError::GridMismatch.into());
    }
    let grid = field.grid();
    let dim = grid.dim();
    let inv_dt = 1.0 / settings.dt;
    let (system, _) = BoundarySystem::build(field, bc, Some(inv_dt))?;
    let capacity = lumped_weights(field, true, false);

    let outlet_flux = |u: &ScalarField| match bc.outlet {
        Some(r) => r.mass_transfer * (boundary_average(u, Face::XMax) - r.bulk),
        None => 0.0,
    };
    let mass_of = |u: &[f64]| capacity.iter().zip(u).map(|(w, v)| w * v).sum::<f64>();

    let steps = settings.steps();
    let mut times = Vec::with_capacity(steps + 1);
    let mut flux = Vec::with_capacity(steps + 1);
    let mut mass = Vec::with_capacity(steps + 1);
    times.push(0.0);
    flux.push(outlet_flux(initial));
    mass.push(mass_of(initial.values()));

    let mut u = initial.values().to_vec();
    let mut rhs = system.constant_rhs.clone();
    for step in 1..=steps {
        for (i, r) in rhs.iter_mut().enumerate() {
            if system.fixed[i].is_none() {
                *r = system.constant_rhs[i] + capacity[i] * inv_dt * u[i];
            }
        }
        let (next, _) = pcg(&system.matrix, &rhs, Some(&u), config, dim, false)
            .map_err(|e| SolveError::Step { step, source: Box::new(e) })?;
        u = next;
        let state = ScalarField::new(grid.clone(), u.clone())?;
        times.push(step as f64 * settings.dt);
        flux.push(outlet_flux(&state));
        mass.push(mass_of(&u));
    }
    Ok(TransientRun {
        history: FluxHistory { times, flux },
        mass,
        final_state: ScalarField::new(grid.clone(), u)?,
    })
}
