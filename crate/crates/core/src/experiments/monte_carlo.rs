use std::io::{self, Write};

use rayon::prelude::*;

use super::{build_random_field, ExperimentError, McConfig};
use crate::grid::estimate_effective_diffusivity;
use crate::tensor::trial_seed;

/// Header of the campaign CSV. Trial rows fill `trial_index`, `seed` and
/// `d_eff`; the closing summary row puts the mean in `d_eff` and leaves the
/// index and seed empty.
pub const CSV_COLUMNS: &str = "row,trial_index,seed,d_eff,std_dev,std_error";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialResult {
    pub index: usize,
    pub seed: u64,
    pub d_eff: f64,
}

/// Per-trial estimates and their summary statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct McStatistics {
    pub config: McConfig,
    pub trials: Vec<TrialResult>,
    pub mean: f64,
    /// Sample standard deviation with the `n − 1` denominator (0 for one trial).
    pub std_dev: f64,
    pub std_error: f64,
}

impl McStatistics {
    pub fn from_trials(config: McConfig, trials: Vec<TrialResult>) -> Self {
        let n = trials.len() as f64;
        let mean = trials.iter().map(|t| t.d_eff).sum::<f64>() / n;
        let std_dev = if trials.len() > 1 {
            let ss: f64 = trials.iter().map(|t| (t.d_eff - mean).powi(2)).sum();
            (ss / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { config, trials, mean, std_dev, std_error: std_dev / n.sqrt() }
    }

    pub fn values(&self) -> Vec<f64> {
        self.trials.iter().map(|t| t.d_eff).collect()
    }

    pub fn abs_error(&self, reference: f64) -> f64 {
        (self.mean - reference).abs()
    }

    /// Resolved campaign parameters as `key=value` pairs, in CSV order.
    pub fn config_pairs(&self) -> Vec<(String, String)> {
        let c = &self.config;
        let q = c.q.diag().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        vec![
            ("dim".into(), c.dim.to_string()),
            ("n".into(), c.n.to_string()),
            ("trials".into(), c.trials.to_string()),
            ("q".into(), q),
            ("seed".into(), c.master_seed.to_string()),
            ("refinement".into(), c.refinement.to_string()),
            ("c0".into(), c.bc.c0.to_string()),
            ("c1".into(), c.bc.c1.to_string()),
            ("mass_transfer".into(), c.bc.mass_transfer.to_string()),
            ("tol".into(), c.solver.rel_tol.to_string()),
            (
                "max_iter".into(),
                c.solver.max_iter.map_or_else(|| "auto".to_string(), |m| m.to_string()),
            ),
        ]
    }

    /// Writes `# key=value` lines for `extra` and the campaign configuration,
    /// then the table described by [`CSV_COLUMNS`].
    pub fn write_csv<W: Write>(&self, mut out: W, extra: &[(String, String)]) -> io::Result<()> {
        for (k, v) in extra.iter().chain(self.config_pairs().iter()) {
            writeln!(out, "# {k}={v}")?;
        }
        writeln!(out, "{CSV_COLUMNS}")?;
        for t in &self.trials {
            writeln!(out, "trial,{},{},{},,", t.index, t.seed, t.d_eff)?;
        }
        writeln!(out, "summary,,,{},{},{}", self.mean, self.std_dev, self.std_error)?;
        Ok(())
    }
}

/// Runs a campaign on the global rayon pool.
pub fn monte_carlo(config: &McConfig) -> Result<McStatistics, ExperimentError> {
    config.validate()?;
    run_trials(config)
}

/// Runs a campaign on a dedicated pool of `threads` workers (`None` or 0:
/// all available cores). Results do not depend on the thread count.
pub fn monte_carlo_with_threads(config: &McConfig, threads: Option<usize>) -> Result<McStatistics, ExperimentError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| ExperimentError::ThreadPool(e.to_string()))?;
    pool.install(|| run_trials(config))
}

fn run_trials(config: &McConfig) -> Result<McStatistics, ExperimentError> {
    let outcomes: Vec<Result<TrialResult, ExperimentError>> = (0..config.trials)
        .into_par_iter()
        .map(|index| {
            let field = build_random_field(config, index)?;
            let d_eff = estimate_effective_diffusivity(&field, &config.bc, &config.solver)
                .map_err(|source| ExperimentError::Trial { index, source })?;
            Ok(TrialResult { index, seed: trial_seed(config.master_seed, index as u64), d_eff })
        })
        .collect();
    // lowest failing index wins, independent of scheduling
    let trials = outcomes.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(McStatistics::from_trials(config.clone(), trials))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SolverConfig;

    #[test]
    fn sample_statistics() {
        let config = McConfig::new(&[1.0, 1.0], 1, 4, 0).unwrap();
        let trials = [1.0, 2.0, 3.0, 4.0]
            .iter()
            .enumerate()
            .map(|(index, d)| TrialResult { index, seed: 0, d_eff: *d })
            .collect();
        let s = McStatistics::from_trials(config, trials);
        assert_eq!(s.mean, 2.5);
        // Σ(x − 2.5)² = 5, / 3
        assert!((s.std_dev - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((s.std_error - s.std_dev / 2.0).abs() < 1e-15);
    }

    #[test]
    fn isotropic_campaign_is_exact() {
        for q in [vec![4.0, 4.0], vec![2.0, 2.0, 2.0]] {
            let config = McConfig::new(&q, 2, 3, 9).unwrap();
            let s = monte_carlo(&config).unwrap();
            for t in &s.trials {
                assert!((t.d_eff - q[0]).abs() < 1e-8 * q[0]);
            }
            assert!(s.std_dev < 1e-8);
        }
    }

    #[test]
    fn failing_trial_aborts_with_index() {
        let mut config = McConfig::new(&[1.0, 10.0], 4, 3, 1).unwrap();
        config.solver = SolverConfig { rel_tol: 1e-12, max_iter: Some(1) };
        match monte_carlo(&config) {
            Err(ExperimentError::Trial { index: 0, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn csv_layout() {
        let config = McConfig::new(&[4.0, 4.0], 1, 2, 7).unwrap();
        let s = monte_carlo(&config).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf, &[("command".into(), "mc2d".into())]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# command=mc2d");
        assert!(lines.contains(&"# seed=7"));
        let header = lines.iter().position(|l| *l == CSV_COLUMNS).unwrap();
        assert!(lines[header + 1].starts_with("trial,0,"));
        assert!(lines[header + 3].starts_with("summary,,,"));
        assert_eq!(lines.len(), header + 4);
    }
}
