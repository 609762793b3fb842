//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use floqlab::{DriveForm, DriveParams};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key: {key}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key: {key}")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: {key}: expected a number, got {value:?}")]
    NotNumeric { line: usize, key: String, value: String },
    #[error("line {line}: {key}: {message}")]
    Invalid { line: usize, key: String, message: String },
    #[error("missing key: {0}")]
    Missing(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    QuasienergyScan,
    OverlapScan,
    Dynamics,
    Llg,
    Ladder,
    ResonanceLocate,
    SteadySweep,
}

impl Experiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::QuasienergyScan => "quasienergy-scan",
            Experiment::OverlapScan => "overlap-scan",
            Experiment::Dynamics => "dynamics",
            Experiment::Llg => "llg",
            Experiment::Ladder => "ladder",
            Experiment::ResonanceLocate => "resonance-locate",
            Experiment::SteadySweep => "steady-sweep",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "quasienergy-scan" => Experiment::QuasienergyScan,
            "overlap-scan" => Experiment::OverlapScan,
            "dynamics" => Experiment::Dynamics,
            "llg" => Experiment::Llg,
            "ladder" => Experiment::Ladder,
            "resonance-locate" => Experiment::ResonanceLocate,
            "steady-sweep" => Experiment::SteadySweep,
            _ => return Err(format!("unknown experiment {s:?}")),
        })
    }
}

/// Starting state for `dynamics`; the classical run starts from the
/// matching Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Initial {
    Ground,
    Up,
    Down,
}

impl Initial {
    pub fn as_str(self) -> &'static str {
        match self {
            Initial::Ground => "ground",
            Initial::Up => "up",
            Initial::Down => "down",
        }
    }
}

impl FromStr for Initial {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ground" => Ok(Initial::Ground),
            "up" => Ok(Initial::Up),
            "down" => Ok(Initial::Down),
            _ => Err(format!("expected ground, up or down, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub params: DriveParams,
    /// Frequency window and point count for scans and sweeps.
    pub omega0_min: f64,
    pub omega0_max: f64,
    pub omega0_points: usize,
    pub gamma: f64,
    pub cutoff: f64,
    pub temperatures: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub initial: Initial,
    pub steps_per_period: usize,
    pub samples_per_period: usize,
    pub n_periods: usize,
    pub n_half_width: usize,
    pub n_max: usize,
    pub grid: usize,
    pub tolerance: f64,
    pub refine: bool,
    pub output: String,
}

const KEYS: &[&str] = &[
    "experiment",
    "delta",
    "epsilon",
    "amplitude",
    "omega0",
    "form",
    "omega0_min",
    "omega0_max",
    "omega0_points",
    "gamma",
    "cutoff",
    "temperatures",
    "lambdas",
    "initial",
    "steps_per_period",
    "samples_per_period",
    "n_periods",
    "n_half_width",
    "n_max",
    "grid",
    "tolerance",
    "refine",
    "output",
];

struct Entries(BTreeMap<String, (usize, String)>);

impl Entries {
    fn text(&self, key: &str) -> Option<(usize, &str)> {
        self.0.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn float(&self, key: &str, default: f64) -> Result<(usize, f64), ConfigError> {
        match self.text(key) {
            None => Ok((0, default)),
            Some((line, v)) => parse_float(line, key, v).map(|x| (line, x)),
        }
    }

    fn positive(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        let (line, x) = self.float(key, default)?;
        if !(x > 0.0) {
            return Err(invalid(line, key, format!("must be > 0, got {x}")));
        }
        Ok(x)
    }

    fn count(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        let Some((line, v)) = self.text(key) else {
            return Ok(default);
        };
        let n: usize = v.parse().map_err(|_| {
            if v.parse::<f64>().is_ok() {
                invalid(line, key, format!("must be a positive integer, got {v}"))
            } else {
                not_numeric(line, key, v)
            }
        })?;
        if n == 0 {
            return Err(invalid(line, key, "must be positive".into()));
        }
        Ok(n)
    }

    fn list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, ConfigError> {
        let Some((line, v)) = self.text(key) else {
            return Ok(default.to_vec());
        };
        let xs = v
            .split(',')
            .map(|s| parse_float(line, key, s.trim()))
            .collect::<Result<Vec<_>, _>>()?;
        if xs.iter().any(|&x| x < 0.0) {
            return Err(invalid(line, key, "values must be ≥ 0".into()));
        }
        Ok(xs)
    }

    fn parsed<T: FromStr<Err = String>>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        match self.text(key) {
            None => Ok(default),
            Some((line, v)) => v.parse().map_err(|m| invalid(line, key, m)),
        }
    }
}

fn parse_float(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(not_numeric(line, key, v)),
    }
}

fn not_numeric(line: usize, key: &str, v: &str) -> ConfigError {
    ConfigError::NotNumeric {
        line,
        key: key.into(),
        value: v.into(),
    }
}

fn invalid(line: usize, key: &str, message: String) -> ConfigError {
    ConfigError::Invalid {
        line,
        key: key.into(),
        message,
    }
}

/// Parses and validates a configuration, filling defaults (Δ = ε = 1, A = 2,
/// Ω = 500, experiment-specific numerics).
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                text: content.into(),
            });
        };
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(ConfigError::UnknownKey { line, key: k.into() });
        }
        if map.insert(k.to_string(), (line, v.to_string())).is_some() {
            return Err(ConfigError::DuplicateKey { line, key: k.into() });
        }
    }
    let e = Entries(map);

    let experiment = match e.text("experiment") {
        None | Some((_, "")) => return Err(ConfigError::Missing("experiment")),
        Some((line, v)) => v.parse().map_err(|m| invalid(line, "experiment", m))?,
    };
    let (_, delta) = e.float("delta", 1.0)?;
    let (_, epsilon) = e.float("epsilon", 1.0)?;
    let (_, amplitude) = e.float("amplitude", 2.0)?;
    let (omega_line, omega0) = e.float("omega0", 0.194859)?;
    if !(omega0 > 0.0) {
        return Err(invalid(omega_line, "omega0", format!("must be > 0, got {omega0}")));
    }
    let form: DriveForm = match e.text("form") {
        None => DriveForm::SineX,
        Some((line, v)) => v.parse().map_err(|m: floqlab::FloqError| invalid(line, "form", m.to_string()))?,
    };
    let params = DriveParams::new(delta, epsilon, amplitude, omega0)
        .map_err(|m| invalid(0, "params", m.to_string()))?
        .with_form(form);

    use Experiment::*;
    let (lo, hi, points) = match experiment {
        SteadySweep => (0.15, 0.6, 600),
        ResonanceLocate => (0.19, 0.20, 101),
        _ => (0.1, 1.0, 181),
    };
    let omega0_min = e.positive("omega0_min", lo)?;
    let omega0_max = e.positive("omega0_max", hi)?;
    if omega0_max <= omega0_min {
        let line = e.text("omega0_max").or(e.text("omega0_min")).map_or(0, |t| t.0);
        return Err(invalid(line, "omega0_max", "must exceed omega0_min".into()));
    }
    let n_periods = e.count(
        "n_periods",
        match experiment {
            Dynamics => 3000,
            Llg => 2000,
            _ => 50,
        },
    )?;
    let samples_per_period = e.count(
        "samples_per_period",
        match experiment {
            Ladder => 16,
            _ => 64,
        },
    )?;
    let output = match e.text("output") {
        Some((line, "")) => return Err(invalid(line, "output", "must not be empty".into())),
        Some((_, v)) => v.to_string(),
        None => experiment.as_str().to_string(),
    };
    let refine = match e.text("refine") {
        None => true,
        Some((_, "true")) => true,
        Some((_, "false")) => false,
        Some((line, v)) => return Err(invalid(line, "refine", format!("expected true or false, got {v:?}"))),
    };

    Ok(RunConfig {
        experiment,
        params,
        omega0_min,
        omega0_max,
        omega0_points: e.count("omega0_points", points)?,
        gamma: e.positive("gamma", 0.01)?,
        cutoff: e.positive("cutoff", 500.0)?,
        temperatures: e.list("temperatures", &[0.0, 0.01, 1.0])?,
        lambdas: e.list("lambdas", &[0.001, 0.01, 0.1])?,
        initial: e.parsed("initial", Initial::Ground)?,
        steps_per_period: e.count("steps_per_period", 4096)?,
        samples_per_period,
        n_periods,
        n_half_width: e.count("n_half_width", 32)?,
        n_max: e.count("n_max", 64)?,
        grid: e.count("grid", 1024)?,
        tolerance: e.positive("tolerance", 1e-10)?,
        refine,
        output,
    })
}

impl RunConfig {
    /// Every setting as `key = value` lines, for output preambles.
    pub fn provenance(&self) -> Vec<String> {
        let p = &self.params;
        let list = |xs: &[f64]| xs.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(", ");
        vec![
            format!("experiment = {}", self.experiment),
            format!("delta = {:e}", p.delta),
            format!("epsilon = {:e}", p.epsilon),
            format!("amplitude = {:e}", p.amplitude),
            format!("omega0 = {:e}", p.omega0),
            format!("form = {}", p.form.as_str()),
            format!("omega0_min = {:e}", self.omega0_min),
            format!("omega0_max = {:e}", self.omega0_max),
            format!("omega0_points = {}", self.omega0_points),
            format!("gamma = {:e}", self.gamma),
            format!("cutoff = {:e}", self.cutoff),
            format!("temperatures = {}", list(&self.temperatures)),
            format!("lambdas = {}", list(&self.lambdas)),
            format!("initial = {}", self.initial.as_str()),
            format!("steps_per_period = {}", self.steps_per_period),
            format!("samples_per_period = {}", self.samples_per_period),
            format!("n_periods = {}", self.n_periods),
            format!("n_half_width = {}", self.n_half_width),
            format!("n_max = {}", self.n_max),
            format!("grid = {}", self.grid),
            format!("tolerance = {:e}", self.tolerance),
            format!("refine = {}", self.refine),
            format!("output = {}", self.output),
        ]
    }

    pub fn omega0_grid(&self) -> Vec<f64> {
        floqlab::dissipation::uniform_grid(self.omega0_min, self.omega0_max, self.omega0_points)
    }
}
