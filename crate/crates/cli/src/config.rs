//! Declarative run configuration (TOML) and command-line overrides.
//!
//! Vertices are numbered from 1 in configuration files. Relative paths are
//! resolved against the directory holding the configuration file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WalkChoice {
    Local,
    Global,
    NonMoralising,
}

/// How `H` and the Lindblad operators are derived from the graph.
///
/// `generator`: `H = gamma (D - G^u)`; local `M_L` is entrywise
/// `sqrt|gamma (D - G)|`; global `L = G`.
/// `adjacency`: `H = gamma G^u`; local `M_L = G`; global `L = G`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorStyle {
    #[default]
    Generator,
    Adjacency,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum TimeSpec {
    Series { t1: f64, tq: f64, steps: usize },
    Single { t: f64 },
}

impl TimeSpec {
    pub fn n_points(&self) -> usize {
        match self {
            TimeSpec::Series { steps, .. } => steps + 1,
            TimeSpec::Single { .. } => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialSpec {
    /// Uniform over the graph vertices; sources and sinks start empty.
    Mixed,
    Vertex(usize),
    Populations(Vec<f64>),
    /// Whitespace-separated numbers: `n` populations, or `2 n^2` values
    /// holding a row-major density matrix as interleaved real and imaginary parts.
    File(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Attachment {
    pub vertex: usize,
    pub rate: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub populations: bool,
    pub full_rho: bool,
    pub coherence_norm: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs {
            populations: true,
            full_rho: false,
            coherence_norm: false,
        }
    }
}

fn one() -> f64 {
    1.0
}

fn one_worker() -> usize {
    1
}

fn mixed() -> InitialSpec {
    InitialSpec::Mixed
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub walk: WalkChoice,
    pub graph: PathBuf,
    #[serde(default)]
    pub operators: OperatorStyle,
    pub omega: f64,
    #[serde(default = "one")]
    pub gamma: f64,
    pub time: TimeSpec,
    #[serde(default = "mixed")]
    pub initial: InitialSpec,
    #[serde(default)]
    pub sources: Vec<Attachment>,
    #[serde(default)]
    pub sinks: Vec<Attachment>,
    #[serde(default = "one_worker")]
    pub workers: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// Flag values that replace the corresponding configuration entries.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub omega: Option<f64>,
    pub time: Option<TimeSpec>,
    pub workers: Option<usize>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Parses and validates; relative paths become relative to `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self, CliError> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.graph = base_dir.join(&cfg.graph);
        if let InitialSpec::File(p) = &cfg.initial {
            cfg.initial = InitialSpec::File(base_dir.join(p));
        }
        if let Some(out) = &cfg.output {
            cfg.output = Some(base_dir.join(out));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_toml_str(&text, base)
    }

    pub fn apply(&mut self, overrides: Overrides) -> Result<(), CliError> {
        if let Some(omega) = overrides.omega {
            self.omega = omega;
        }
        if let Some(time) = overrides.time {
            self.time = time;
        }
        if let Some(workers) = overrides.workers {
            self.workers = workers;
        }
        if overrides.output.is_some() {
            self.output = overrides.output;
        }
        self.validate()
    }

    /// Checks everything that does not need the graph.
    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |msg: String| Err(CliError::Config(msg));
        if !(0.0..=1.0).contains(&self.omega) {
            return fail(format!("omega must lie in [0, 1], got {}", self.omega));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return fail(format!("gamma must be positive, got {}", self.gamma));
        }
        if self.workers == 0 {
            return fail("workers must be at least 1".into());
        }
        if let Some(tol) = self.tolerance {
            if !(tol > 0.0 && tol < 1.0) {
                return fail(format!("tolerance must lie in (0, 1), got {tol}"));
            }
        }
        match self.time {
            TimeSpec::Single { t } if !t.is_finite() => return fail(format!("time {t} is not finite")),
            TimeSpec::Series { t1, tq, steps } => {
                if !(t1.is_finite() && tq.is_finite()) || tq < t1 {
                    return fail(format!("invalid time range [{t1}, {tq}]"));
                }
                if steps == 0 && t1 != tq {
                    return fail("steps = 0 requires t1 = tq".into());
                }
            }
            _ => {}
        }
        if self.walk != WalkChoice::Local && !(self.sources.is_empty() && self.sinks.is_empty()) {
            return fail("sources and sinks are only supported for local walks".into());
        }
        if self.walk == WalkChoice::NonMoralising && self.operators == OperatorStyle::Adjacency {
            return fail("non-moralising walks are built from the generator only".into());
        }
        for a in self.sources.iter().chain(&self.sinks) {
            if a.vertex == 0 {
                return fail("vertices are numbered from 1".into());
            }
            if !(a.rate > 0.0 && a.rate.is_finite()) {
                return fail(format!("rate must be positive, got {}", a.rate));
            }
        }
        if let InitialSpec::Vertex(0) = self.initial {
            return fail("vertices are numbered from 1".into());
        }
        let o = self.outputs;
        if !(o.populations || o.full_rho || o.coherence_norm) {
            return fail("no outputs requested".into());
        }
        Ok(())
    }
}
