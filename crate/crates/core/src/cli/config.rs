use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Command {
    Layered,
    Estimate,
    Cellprob,
    Mc2d,
    Mc3d,
    Transient,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Layered,
        Command::Estimate,
        Command::Cellprob,
        Command::Mc2d,
        Command::Mc3d,
        Command::Transient,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Layered => "layered",
            Command::Estimate => "estimate",
            Command::Cellprob => "cellprob",
            Command::Mc2d => "mc2d",
            Command::Mc3d => "mc3d",
            Command::Transient => "transient",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    fn summary(self) -> &'static str {
        match self {
            Command::Layered => "closed-form effective tensor of perfect layers",
            Command::Estimate => "stationary estimate on a phase mask or synthetic layers",
            Command::Cellprob => "periodic cell problem on a layered, checkerboard or random field",
            Command::Mc2d => "Monte Carlo campaign on randomly rotated 2D sub-cells",
            Command::Mc3d => "Monte Carlo campaign on randomly rotated 3D sub-cells",
            Command::Transient => "detailed versus homogenized outlet flux histories",
        }
    }

    pub fn keys(self) -> &'static [Key] {
        match self {
            Command::Layered => LAYERED,
            Command::Estimate => ESTIMATE,
            Command::Cellprob => CELLPROB,
            Command::Mc2d | Command::Mc3d => MONTE_CARLO,
            Command::Transient => TRANSIENT,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Kind {
    /// Integer ≥ 1.
    Count,
    /// Integer ≥ 0.
    Natural,
    /// Finite real.
    Real,
    /// Finite real > 0.
    Positive,
    /// Comma-separated positive reals.
    Reals,
    Choice(&'static [&'static str]),
    Path,
}

impl Kind {
    fn describe(self) -> String {
        match self {
            Kind::Count => "a positive integer".into(),
            Kind::Natural => "a non-negative integer".into(),
            Kind::Real => "a finite number".into(),
            Kind::Positive => "a positive number".into(),
            Kind::Reals => "a comma-separated list of positive numbers".into(),
            Kind::Choice(options) => format!("one of {}", options.join("|")),
            Kind::Path => "a file path".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Need {
    Required,
    Default(&'static str),
    Optional,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Key {
    pub name: &'static str,
    pub kind: Kind,
    pub need: Need,
    pub help: &'static str,
}

const fn key(name: &'static str, kind: Kind, need: Need, help: &'static str) -> Key {
    Key { name, kind, need, help }
}

use Kind::*;
use Need::*;

const LAYERED: &[Key] = &[
    key("p1", Positive, Required, "volume fraction of the aqueous phase"),
    key("d1", Positive, Required, "aqueous diffusivity"),
    key("d2n", Positive, Required, "lipid diffusivity normal to the layers"),
    key("d2t", Positive, Optional, "lipid diffusivity along the layers (default d2n)"),
    key("kp", Positive, Default("1"), "partition coefficient"),
];

const ESTIMATE: &[Key] = &[
    key("mask", Path, Optional, "PGM phase mask; synthetic layers when absent"),
    key("threshold", Real, Optional, "grey level separating the phases (default maxval/2)"),
    key("p2", Positive, Default("0.1878"), "synthetic lipid fraction"),
    key("layers", Count, Default("4"), "synthetic layer count"),
    key("wobble", Real, Default("0"), "synthetic stripe wobble, fraction of the pitch"),
    key("gaps", Real, Default("0"), "expected gaps per synthetic stripe"),
    key("width", Count, Default("256"), "synthetic pixels along x"),
    key("height", Count, Default("64"), "synthetic pixels along y"),
    key("mask_seed", Natural, Default("0"), "seed of the synthetic gaps"),
    key("lx", Positive, Default("4.359e-7"), "physical length along x"),
    key("d1", Positive, Default("1e-14"), "aqueous diffusivity"),
    key("d2n", Positive, Default("1e-12"), "lipid diffusivity normal to the layers"),
    key("d2t", Positive, Default("1e-10"), "lipid diffusivity along the layers"),
    key("kp", Positive, Default("1"), "partition coefficient"),
    key("c0", Real, Default("1"), "inlet concentration"),
    key("c1", Real, Default("0"), "bulk concentration beyond the outlet"),
    key("mass_transfer", Positive, Optional, "outlet mass transfer coefficient (default 0.5 d_ref / L)"),
    key("tol", Positive, Default("1e-10"), "relative residual tolerance"),
    key("max_iter", Count, Optional, "iteration cap (default 50 n^(1/dim))"),
];

const CELLPROB: &[Key] = &[
    key("geometry", Choice(&["layered", "checkerboard", "random"]), Default("layered"), "cell geometry"),
    key("cells", Count, Default("16"), "elements per axis (per sub-cell axis for random)"),
    key("p1", Positive, Default("0.8122"), "layered: aqueous fraction"),
    key("d1", Positive, Default("1e-14"), "layered: aqueous diffusivity"),
    key("d2n", Positive, Default("1e-12"), "layered: lipid diffusivity normal to the layers"),
    key("d2t", Positive, Default("1e-10"), "layered: lipid diffusivity along the layers"),
    key("kp", Positive, Default("1"), "layered: partition coefficient"),
    key("a", Positive, Default("1"), "checkerboard: first phase"),
    key("b", Positive, Default("4"), "checkerboard: second phase"),
    key("q", Reals, Default("1,10"), "random: diagonal of Q"),
    key("n", Count, Default("4"), "random: sub-cells per axis"),
    key("seed", Natural, Default("0"), "random: master seed"),
    key("trial", Natural, Default("0"), "random: trial index"),
    key("tol", Positive, Default("1e-10"), "relative residual tolerance"),
    key("max_iter", Count, Optional, "iteration cap"),
];

const MONTE_CARLO: &[Key] = &[
    key("n", Count, Required, "sub-cells per axis"),
    key("trials", Count, Required, "number of realizations"),
    key("q", Reals, Required, "diagonal of Q, one entry per axis"),
    key("seed", Natural, Default("0"), "master seed"),
    key("refinement", Count, Optional, "elements per sub-cell axis (default 3)"),
    key("c0", Real, Default("1"), "inlet concentration"),
    key("c1", Real, Default("0"), "bulk concentration beyond the outlet"),
    key("mass_transfer", Positive, Optional, "outlet mass transfer coefficient (default 0.5 det(Q)^(1/dim))"),
    key("tol", Positive, Default("1e-10"), "relative residual tolerance"),
    key("max_iter", Count, Optional, "iteration cap"),
];

const TRANSIENT: &[Key] = &[
    key("mask", Path, Optional, "PGM phase mask; synthetic layers when absent"),
    key("threshold", Real, Optional, "grey level separating the phases"),
    key("p2", Positive, Default("0.1878"), "synthetic lipid fraction"),
    key("layers", Count, Default("4"), "synthetic layer count"),
    key("wobble", Real, Default("0"), "synthetic stripe wobble"),
    key("gaps", Real, Default("0"), "expected gaps per synthetic stripe"),
    key("width", Count, Default("128"), "synthetic pixels along x"),
    key("height", Count, Default("16"), "synthetic pixels along y"),
    key("mask_seed", Natural, Default("0"), "seed of the synthetic gaps"),
    key("lx", Positive, Default("4.359e-7"), "physical length along x"),
    key("d1", Positive, Default("1e-14"), "aqueous diffusivity"),
    key("d2n", Positive, Default("1e-12"), "lipid diffusivity normal to the layers"),
    key("d2t", Positive, Default("1e-10"), "lipid diffusivity along the layers"),
    key("kp", Positive, Default("1"), "partition coefficient"),
    key("d_eff", Positive, Optional, "homogenized diffusivity (default: stationary estimate)"),
    key("c0", Real, Default("1e-6"), "inlet concentration"),
    key("c1", Real, Default("0"), "bulk concentration beyond the outlet"),
    key("mass_transfer", Positive, Optional, "outlet mass transfer coefficient"),
    key("amplitude", Real, Default("1e-6"), "initial bump height"),
    key("sharpness", Positive, Default("1000"), "initial bump sharpness"),
    key("bump_length", Positive, Default("2.179e-7"), "initial bump length scale"),
    key("t_end", Positive, Optional, "final time (default L^2 <sigma> / d_eff)"),
    key("steps", Count, Default("200"), "backward Euler steps"),
    key("tol", Positive, Default("1e-10"), "relative residual tolerance"),
    key("max_iter", Count, Optional, "iteration cap"),
];

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(u64),
    Real(f64),
    Reals(Vec<f64>),
    Text(String),
    Path(PathBuf),
}

impl Value {
    fn parse(key: &Key, raw: &str) -> Result<Self, CliError> {
        let raw = raw.trim();
        let mismatch = || CliError::Usage(format!("--{} expects {}, got '{raw}'", key.name, key.kind.describe()));
        let real = |s: &str| s.trim().parse::<f64>().ok().filter(|v| v.is_finite());
        match key.kind {
            Count => raw.parse::<u64>().ok().filter(|v| *v >= 1).map(Value::Int).ok_or_else(mismatch),
            Natural => raw.parse::<u64>().map(Value::Int).map_err(|_| mismatch()),
            Kind::Real => real(raw).map(Value::Real).ok_or_else(mismatch),
            Positive => real(raw).filter(|v| *v > 0.0).map(Value::Real).ok_or_else(mismatch),
            Reals => raw
                .split(',')
                .map(|s| real(s).filter(|v| *v > 0.0))
                .collect::<Option<Vec<_>>>()
                .map(Value::Reals)
                .ok_or_else(mismatch),
            Choice(options) => options
                .iter()
                .find(|o| **o == raw)
                .map(|o| Value::Text(o.to_string()))
                .ok_or_else(mismatch),
            Kind::Path if raw.is_empty() => Err(mismatch()),
            Kind::Path => Ok(Value::Path(PathBuf::from(raw))),
        }
    }

    fn render(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Real(v) => v.to_string(),
            Value::Reals(v) => v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
            Value::Text(s) => s.clone(),
            Value::Path(p) => p.display().to_string(),
        }
    }
}

/// Fully resolved invocation: every key of the subcommand holds a typed value
/// unless it is optional and was not given.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    params: BTreeMap<&'static str, Value>,
    pub out: Option<PathBuf>,
    /// Worker threads for Monte Carlo campaigns; `None` uses every core.
    pub threads: Option<usize>,
    pub verbosity: u8,
}

impl RunConfig {
    pub fn get(&self, name: &str) -> Option<&Value> {
        self.params.get(name)
    }

    pub(crate) fn count(&self, name: &str) -> usize {
        self.opt_count(name).unwrap_or_else(|| panic!("{name} is not a resolved integer key"))
    }

    pub(crate) fn opt_count(&self, name: &str) -> Option<usize> {
        match self.params.get(name) {
            Some(Value::Int(v)) => Some(*v as usize),
            _ => None,
        }
    }

    pub(crate) fn seed(&self, name: &str) -> u64 {
        match self.params.get(name) {
            Some(Value::Int(v)) => *v,
            _ => panic!("{name} is not a resolved integer key"),
        }
    }

    pub(crate) fn real(&self, name: &str) -> f64 {
        self.opt_real(name).unwrap_or_else(|| panic!("{name} is not a resolved real key"))
    }

    pub(crate) fn opt_real(&self, name: &str) -> Option<f64> {
        match self.params.get(name) {
            Some(Value::Real(v)) => Some(*v),
            _ => None,
        }
    }

    pub(crate) fn reals(&self, name: &str) -> &[f64] {
        match self.params.get(name) {
            Some(Value::Reals(v)) => v,
            _ => panic!("{name} is not a resolved list key"),
        }
    }

    pub(crate) fn text(&self, name: &str) -> &str {
        match self.params.get(name) {
            Some(Value::Text(v)) => v,
            _ => panic!("{name} is not a resolved text key"),
        }
    }

    pub(crate) fn path(&self, name: &str) -> Option<&Path> {
        match self.params.get(name) {
            Some(Value::Path(p)) => Some(p),
            _ => None,
        }
    }

    /// Resolved parameters in declaration order, led by the subcommand. The
    /// thread count is left out since it never changes results.
    pub fn resolved_pairs(&self) -> Vec<(String, String)> {
        let mut pairs = vec![("command".to_string(), self.command.name().to_string())];
        for k in self.command.keys() {
            if let Some(v) = self.params.get(k.name) {
                pairs.push((k.name.to_string(), v.render()));
            }
        }
        pairs
    }
}

/// Parses `args` (without the program name).
///
/// The first argument names the subcommand. Parameters are given as
/// `--key value` or `--key=value`; `--config FILE` reads `key = value` lines
/// (blank lines and `#` comments ignored) that flags then override. `--out`,
/// `--threads` and `-v` may also appear in the file as `out`, `threads` and
/// `verbose`.
pub fn parse_config<S: AsRef<str>>(args: &[S]) -> Result<RunConfig, CliError> {
    let args: Vec<&str> = args.iter().map(AsRef::as_ref).collect();
    let Some((&first, rest)) = args.split_first() else {
        return Err(CliError::Usage("missing subcommand".into()));
    };
    if matches!(first, "-h" | "--help" | "help") {
        return Err(CliError::Help(usage(rest.first().and_then(|c| Command::from_name(c)))));
    }
    let command = Command::from_name(first)
        .ok_or_else(|| CliError::Usage(format!("unknown subcommand '{first}'")))?;

    let mut flags: Vec<(String, String)> = Vec::new();
    let mut config_file = None;
    let mut verbosity = 0u8;
    let mut i = 0;
    while i < rest.len() {
        let arg = rest[i];
        i += 1;
        match arg {
            "-h" | "--help" => return Err(CliError::Help(usage(Some(command)))),
            "-v" | "--verbose" => verbosity += 1,
            "-vv" => verbosity += 2,
            _ => {
                let Some(body) = arg.strip_prefix("--") else {
                    return Err(CliError::Usage(format!("unexpected argument '{arg}'")));
                };
                let (name, value) = match body.split_once('=') {
                    Some((n, v)) => (n.to_string(), v.to_string()),
                    None => {
                        let v = rest
                            .get(i)
                            .ok_or_else(|| CliError::Usage(format!("--{body} needs a value")))?;
                        i += 1;
                        (body.to_string(), v.to_string())
                    }
                };
                let name = name.replace('-', "_");
                if name == "config" {
                    config_file = Some(PathBuf::from(value));
                } else {
                    flags.push((name, value));
                }
            }
        }
    }

    let mut entries = match &config_file {
        Some(path) => read_config_file(path)?,
        None => Vec::new(),
    };
    entries.extend(flags);
    resolve(command, entries, verbosity)
}

fn read_config_file(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    let mut entries = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("{}:{}: expected key = value", path.display(), n + 1))
        })?;
        entries.push((k.trim().replace('-', "_"), v.trim().to_string()));
    }
    Ok(entries)
}

/// Later entries override earlier ones.
fn resolve(command: Command, entries: Vec<(String, String)>, mut verbosity: u8) -> Result<RunConfig, CliError> {
    let keys = command.keys();
    let mut raw: BTreeMap<&'static str, String> = BTreeMap::new();
    let mut out = None;
    let mut threads = None;
    for (name, value) in entries {
        match name.as_str() {
            "out" => out = Some(PathBuf::from(value)),
            "threads" => {
                let n = value.trim().parse::<usize>().map_err(|_| {
                    CliError::Usage(format!("--threads expects a non-negative integer, got '{value}'"))
                })?;
                threads = (n > 0).then_some(n);
            }
            "verbose" => {
                verbosity = value.trim().parse().map_err(|_| {
                    CliError::Usage(format!("--verbose expects a small integer, got '{value}'"))
                })?;
            }
            _ => {
                let k = keys.iter().find(|k| k.name == name).ok_or_else(|| {
                    CliError::Usage(format!("unknown key '{name}' for {}", command.name()))
                })?;
                raw.insert(k.name, value);
            }
        }
    }

    let mut params = BTreeMap::new();
    for k in keys {
        let text = match (raw.remove(k.name), k.need) {
            (Some(v), _) => v,
            (None, Default(d)) => d.to_string(),
            (None, Optional) => continue,
            (None, Required) => {
                return Err(CliError::Usage(format!("missing required key '{}' for {}", k.name, command.name())))
            }
        };
        params.insert(k.name, Value::parse(k, &text)?);
    }
    let config = RunConfig { command, params, out, threads, verbosity };
    check_consistency(&config)?;
    Ok(config)
}

fn check_consistency(config: &RunConfig) -> Result<(), CliError> {
    let bad = |msg: String| Err(CliError::Usage(msg));
    match config.command {
        Command::Mc2d | Command::Mc3d => {
            let dim = if config.command == Command::Mc2d { 2 } else { 3 };
            if config.reals("q").len() != dim {
                return bad(format!("--q needs {dim} entries for {}", config.command.name()));
            }
        }
        Command::Layered => {
            if config.real("p1") >= 1.0 {
                return bad("--p1 must lie in (0, 1)".into());
            }
        }
        Command::Cellprob => {
            if config.real("p1") >= 1.0 {
                return bad("--p1 must lie in (0, 1)".into());
            }
            if config.reals("q").len() != 2 && config.reals("q").len() != 3 {
                return bad("--q needs 2 or 3 entries".into());
            }
        }
        Command::Estimate | Command::Transient => {
            if config.real("p2") >= 1.0 {
                return bad("--p2 must lie in (0, 1)".into());
            }
            if config.real("wobble") < 0.0 || config.real("gaps") < 0.0 {
                return bad("--wobble and --gaps must be non-negative".into());
            }
        }
    }
    Ok(())
}

/// Usage text, for one subcommand or the overview.
pub fn usage(command: Option<Command>) -> String {
    let mut s = String::new();
    match command {
        None => {
            s.push_str("usage: effdiff <subcommand> [--key value ...] [--config FILE] [--out FILE] [--threads N] [-v]\n\nsubcommands:\n");
            for c in Command::ALL {
                s.push_str(&format!("  {:<10} {}\n", c.name(), c.summary()));
            }
            s.push_str("\nrun `effdiff help <subcommand>` for its keys\n");
        }
        Some(c) => {
            s.push_str(&format!("usage: effdiff {} [--key value ...]\n{}\n\nkeys:\n", c.name(), c.summary()));
            for k in c.keys() {
                let need = match k.need {
                    Required => "required".to_string(),
                    Default(d) => format!("default {d}"),
                    Optional => "optional".to_string(),
                };
                s.push_str(&format!("  --{:<14} {} ({need})\n", k.name, k.help));
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let c = parse_config(&["layered", "--p1", "0.8", "--d1", "1", "--d2n=2"]).unwrap();
        assert_eq!(c.real("kp"), 1.0);
        assert_eq!(c.opt_real("d2t"), None);
        assert_eq!(c.verbosity, 0);
    }

    #[test]
    fn errors_name_the_key() {
        let msg = |args: &[&str]| match parse_config(args) {
            Err(CliError::Usage(m)) => m,
            other => panic!("{other:?}"),
        };
        assert!(msg(&["mc2d", "--n", "-3", "--trials", "2", "--q", "1,1"]).contains("--n"));
        assert!(msg(&["mc2d", "--trials", "2", "--q", "1,1"]).contains("'n'"));
        assert!(msg(&["mc2d", "--n", "2", "--trials", "2", "--q", "1,1", "--bogus", "1"]).contains("bogus"));
        assert!(msg(&["mc2d", "--n", "2", "--trials", "2", "--q", "1,x"]).contains("--q"));
        assert!(msg(&["mc3d", "--n", "2", "--trials", "2", "--q", "1,1"]).contains("--q"));
        assert!(msg(&["frobnicate"]).contains("frobnicate"));
    }

    #[test]
    fn help_is_not_an_error_kind() {
        assert!(matches!(parse_config(&["--help"]), Err(CliError::Help(_))));
        assert!(matches!(parse_config(&["mc2d", "-h"]), Err(CliError::Help(_))));
    }
}
