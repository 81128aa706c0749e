use std::collections::BTreeMap;

use thiserror::Error;

use super::ProblemId;
use crate::stopping::{Criterion, StoppingConfig};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: expected `key = value`, found `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: key `{key}` given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("invalid value `{value}` for `{key}`")]
    InvalidValue { key: &'static str, value: String },
    #[error("`{key}` = {value} is out of range, expected {expected}")]
    OutOfRange {
        key: &'static str,
        value: String,
        expected: &'static str,
    },
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error("unknown criterion `{0}`, expected tail_off, relative or default")]
    UnknownCriterion(String),
    #[error("missing `{0}`")]
    MissingKey(&'static str),
    #[error("`{key}` is `{file}` in the config file but `{flag}` on the command line")]
    Conflict {
        key: &'static str,
        file: String,
        flag: String,
    },
    #[error("the relative criterion needs at least one degree of freedom")]
    NoDegreesOfFreedom,
    #[error("N_max = {n_max} is below the initial number of degrees of freedom {initial}")]
    NmaxBelowInitial { n_max: usize, initial: usize },
}

/// Accepted configuration keys.
pub const KEYS: [&str; 15] = [
    "problem",
    "theta",
    "criterion",
    "alpha_E",
    "alpha_gamma",
    "n_min",
    "n_batch",
    "d_init",
    "delta_d",
    "tau",
    "g_tol",
    "N_max",
    "rel_energy_stop",
    "seed_sweeps",
    "ref_value",
];

/// Parsed `key = value` lines. Blank lines and lines starting with `#` are
/// ignored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<&'static str, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (k, v) = trimmed.split_once('=').ok_or_else(|| ConfigError::Malformed {
                line,
                text: trimmed.to_string(),
            })?;
            let (k, v) = (k.trim(), v.trim());
            if v.is_empty() {
                return Err(ConfigError::Malformed {
                    line,
                    text: trimmed.to_string(),
                });
            }
            let key = KEYS
                .into_iter()
                .find(|known| *known == k)
                .ok_or_else(|| ConfigError::UnknownKey {
                    line,
                    key: k.to_string(),
                })?;
            if entries.insert(key, v.to_string()).is_some() {
                return Err(ConfigError::DuplicateKey {
                    line,
                    key: k.to_string(),
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

fn parse_f64(key: &'static str, v: &str) -> Result<f64, ConfigError> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| ConfigError::InvalidValue {
            key,
            value: v.to_string(),
        })
}

/// Non-negative integers; scientific notation such as `2e5` is accepted.
fn parse_usize(key: &'static str, v: &str) -> Result<usize, ConfigError> {
    if let Ok(n) = v.parse::<usize>() {
        return Ok(n);
    }
    let x = parse_f64(key, v)?;
    if x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
        Ok(x as usize)
    } else {
        Err(ConfigError::InvalidValue {
            key,
            value: v.to_string(),
        })
    }
}

fn parse_optional(key: &'static str, v: &str) -> Result<Option<f64>, ConfigError> {
    match v {
        "none" | "off" => Ok(None),
        _ => parse_f64(key, v).map(Some),
    }
}

/// Configuration of one adaptive run.
#[derive(Clone, Debug, PartialEq)]
pub struct DriverConfig {
    pub problem: ProblemId,
    /// Dörfler bulk parameter.
    pub theta: f64,
    pub stopping: StoppingConfig,
    /// No mesh with more degrees of freedom than this is solved on.
    pub n_max: usize,
    /// Stop once the relative energy change between meshes falls below this.
    pub rel_energy_stop: Option<f64>,
    /// Uniform refinements of the initial mesh.
    pub seed_sweeps: usize,
    /// Overrides the squared energy norm of the exact solution.
    pub ref_value: Option<f64>,
    /// Compute the iteration error (linear) or a self-reference energy
    /// (nonlinear without known solution); expensive.
    pub diagnostics: bool,
    /// Fill the `wall_s` column. Off by default so that outputs are
    /// byte-for-byte reproducible.
    pub timing: bool,
}

impl DriverConfig {
    /// Parameters of the reference study for `problem` and `criterion`.
    pub fn catalog_defaults(problem: ProblemId, criterion: Criterion) -> Self {
        Self {
            problem,
            theta: 0.5,
            stopping: problem.stopping(criterion),
            n_max: if problem.is_linear() { 100_000 } else { 50_000 },
            rel_energy_stop: None,
            seed_sweeps: problem.default_seed_sweeps(),
            ref_value: None,
            diagnostics: false,
            timing: false,
        }
    }

    /// Builds a configuration from a parsed file. `problem` and `criterion`
    /// given on the command line must agree with the file when both are set.
    pub fn from_file(
        file: &ConfigFile,
        problem: Option<ProblemId>,
        criterion: Option<Criterion>,
    ) -> Result<Self, ConfigError> {
        let problem = resolve(file, "problem", problem)?;
        let criterion = resolve(file, "criterion", criterion)?;
        let mut cfg = Self::catalog_defaults(problem, criterion);
        for (&key, value) in &file.entries {
            let v = value.as_str();
            let s = &mut cfg.stopping;
            match key {
                "problem" | "criterion" => {}
                "theta" => cfg.theta = parse_f64(key, v)?,
                "alpha_E" => s.alpha_e = parse_f64(key, v)?,
                "alpha_gamma" => s.alpha_gamma = parse_f64(key, v)?,
                "n_min" => s.n_min = parse_usize(key, v)?,
                "n_batch" => s.n_batch = parse_usize(key, v)?,
                "d_init" => s.d_init = parse_usize(key, v)?,
                "delta_d" => s.delta_d = parse_usize(key, v)?,
                "tau" => s.tau = parse_f64(key, v)?,
                "g_tol" => s.g_tol = parse_f64(key, v)?,
                "N_max" => cfg.n_max = parse_usize(key, v)?,
                "rel_energy_stop" => cfg.rel_energy_stop = parse_optional(key, v)?,
                "seed_sweeps" => cfg.seed_sweeps = parse_usize(key, v)?,
                "ref_value" => cfg.ref_value = parse_optional(key, v)?,
                _ => unreachable!("keys are checked while parsing"),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Self::from_file(&ConfigFile::parse(text)?, None, None)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(ConfigError::OutOfRange {
                key: "theta",
                value: self.theta.to_string(),
                expected: "in (0, 1)",
            });
        }
        if let Some(r) = self.rel_energy_stop {
            if !(r > 0.0) {
                return Err(ConfigError::OutOfRange {
                    key: "rel_energy_stop",
                    value: r.to_string(),
                    expected: "> 0",
                });
            }
        }
        self.stopping.validate()
    }

    /// `key = value` rendering accepted by [`DriverConfig::parse`].
    pub fn to_config_string(&self) -> String {
        let s = &self.stopping;
        let opt = |v: Option<f64>| v.map_or("none".to_string(), |x| format!("{x:?}"));
        format!(
            "problem = {}\ncriterion = {}\ntheta = {:?}\nalpha_E = {:?}\nalpha_gamma = {:?}\nn_min = {}\nn_batch = {}\n\
             d_init = {}\ndelta_d = {}\ntau = {:?}\ng_tol = {:?}\nN_max = {}\nrel_energy_stop = {}\nseed_sweeps = {}\nref_value = {}\n",
            self.problem,
            s.kind,
            self.theta,
            s.alpha_e,
            s.alpha_gamma,
            s.n_min,
            s.n_batch,
            s.d_init,
            s.delta_d,
            s.tau,
            s.g_tol,
            self.n_max,
            opt(self.rel_energy_stop),
            self.seed_sweeps,
            opt(self.ref_value),
        )
    }
}

fn resolve<T>(file: &ConfigFile, key: &'static str, flag: Option<T>) -> Result<T, ConfigError>
where
    T: std::str::FromStr<Err = ConfigError> + PartialEq + std::fmt::Display,
{
    match (file.get(key).map(str::parse::<T>).transpose()?, flag) {
        (Some(a), Some(b)) if a != b => Err(ConfigError::Conflict {
            key,
            file: a.to_string(),
            flag: b.to_string(),
        }),
        (Some(a), _) => Ok(a),
        (None, Some(b)) => Ok(b),
        (None, None) => Err(ConfigError::MissingKey(key)),
    }
}
