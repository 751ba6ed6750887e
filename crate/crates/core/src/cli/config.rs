//! Run configuration: `key=value` files, flag overrides, validation and
//! the canonical echo.
//!
//! Files hold one or more whitespace-separated `key=value` tokens per line;
//! `#` starts a comment. Later assignments win, and flags are applied after
//! the file. The echo lists every experiment key in a fixed order and
//! parses back to the same configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::experiments::{CloudRotationConfig, CloudVariant, LineRotationConfig, Sampling, SpeedTrialConfig};
use crate::experiments::rotation::RotationTraining;
use crate::net::train::{LossReduction, UpdateMode};
use crate::net::{Activation, OrderingMode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("{location}: {message}")]
    Parse { location: String, message: String },
    #[error("{location}: unknown key '{key}' for experiment {experiment}")]
    UnknownKey {
        location: String,
        key: String,
        experiment: ExperimentId,
    },
    #[error("{location}: {key}={value} is out of range ({reason})")]
    OutOfRange {
        location: String,
        key: String,
        value: String,
        reason: &'static str,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExperimentId {
    #[default]
    Speed,
    Lines,
    Cloud,
    CloudNonlinear,
}

impl ExperimentId {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::Speed => "speed",
            ExperimentId::Lines => "lines",
            ExperimentId::Cloud => "cloud",
            ExperimentId::CloudNonlinear => "cloud-nonlinear",
        }
    }

    pub fn is_rotation(self) -> bool {
        self != ExperimentId::Speed
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "speed" => Ok(ExperimentId::Speed),
            "lines" => Ok(ExperimentId::Lines),
            "cloud" => Ok(ExperimentId::Cloud),
            "cloud-nonlinear" => Ok(ExperimentId::CloudNonlinear),
            other => Err(format!(
                "unknown experiment '{other}' (expected speed, lines, cloud or cloud-nonlinear)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(format!("unknown format '{other}' (expected csv, json or svg)")),
        }
    }
}

/// Experiment parameters; the seed and trial count live inside.
#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Speed(SpeedTrialConfig),
    Lines(LineRotationConfig),
    Cloud(CloudRotationConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: ExperimentId,
    pub params: Params,
    /// Not part of the echo: it does not affect results.
    pub out: PathBuf,
    /// Not part of the echo. Empty means csv and svg.
    pub formats: Vec<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::defaults(ExperimentId::Speed)
    }
}

const COMMON_KEYS: [&str; 9] = [
    "experiment",
    "seed",
    "trials",
    "epsilon",
    "threshold",
    "max_iters",
    "loss_reduction",
    "update_mode",
    "history_stride",
];
const SPEED_KEYS: [&str; 2] = ["models", "init_range"];
const LINE_KEYS: [&str; 5] = ["points", "extent", "hidden", "activation", "shared_init"];
const CLOUD_KEYS: [&str; 5] = ["train_points", "test_points", "hidden", "sampling", "shared_init"];
const OUTPUT_KEYS: [&str; 2] = ["out", "format"];

impl RunConfig {
    pub fn defaults(experiment: ExperimentId) -> Self {
        let params = match experiment {
            ExperimentId::Speed => Params::Speed(SpeedTrialConfig::default()),
            ExperimentId::Lines => Params::Lines(LineRotationConfig::default()),
            ExperimentId::Cloud => Params::Cloud(CloudRotationConfig::default()),
            ExperimentId::CloudNonlinear => Params::Cloud(CloudRotationConfig {
                variant: CloudVariant::SigmoidHidden,
                ..Default::default()
            }),
        };
        Self {
            experiment,
            params,
            out: PathBuf::from("results"),
            formats: Vec::new(),
        }
    }

    /// Keys this experiment accepts, echo keys first in echo order.
    pub fn keys(experiment: ExperimentId) -> Vec<&'static str> {
        let specific: &[&str] = match experiment {
            ExperimentId::Speed => &SPEED_KEYS,
            ExperimentId::Lines => &LINE_KEYS,
            ExperimentId::Cloud | ExperimentId::CloudNonlinear => &CLOUD_KEYS,
        };
        COMMON_KEYS.iter().chain(specific).chain(&OUTPUT_KEYS).copied().collect()
    }

    pub fn seed(&self) -> u64 {
        match &self.params {
            Params::Speed(c) => c.base_seed,
            Params::Lines(c) => c.training.base_seed,
            Params::Cloud(c) => c.training.base_seed,
        }
    }

    pub fn trials(&self) -> usize {
        match &self.params {
            Params::Speed(c) => c.trials,
            Params::Lines(c) => c.training.trials,
            Params::Cloud(c) => c.training.trials,
        }
    }

    pub fn wants(&self, f: Format) -> bool {
        if self.formats.is_empty() {
            f != Format::Json
        } else {
            self.formats.contains(&f)
        }
    }

    fn training_mut(&mut self) -> Option<&mut RotationTraining> {
        match &mut self.params {
            Params::Speed(_) => None,
            Params::Lines(c) => Some(&mut c.training),
            Params::Cloud(c) => Some(&mut c.training),
        }
    }

    fn set(&mut self, a: &Assignment) -> Result<(), ConfigError> {
        let experiment = self.experiment;
        let v = a.value.as_str();
        if !Self::keys(experiment).contains(&a.key.as_str()) {
            return Err(ConfigError::UnknownKey {
                location: a.location.clone(),
                key: a.key.clone(),
                experiment,
            });
        }
        match a.key.as_str() {
            "experiment" => {}
            "out" => self.out = PathBuf::from(v),
            "format" => {
                for part in list(v) {
                    let f = a.parse::<Format>(part)?;
                    if !self.formats.contains(&f) {
                        self.formats.push(f);
                    }
                }
            }
            "seed" => {
                let s = a.parse(v)?;
                match &mut self.params {
                    Params::Speed(c) => c.base_seed = s,
                    _ => self.training_mut().expect("rotation").base_seed = s,
                }
            }
            "trials" => {
                let n = a.at_least(a.parse(v)?, 1)?;
                match &mut self.params {
                    Params::Speed(c) => c.trials = n,
                    _ => self.training_mut().expect("rotation").trials = n,
                }
            }
            "epsilon" => {
                let x = a.positive(a.parse(v)?)?;
                match &mut self.params {
                    Params::Speed(c) => c.learning_rate = x,
                    _ => self.training_mut().expect("rotation").learning_rate = x,
                }
            }
            "threshold" => {
                let x = a.positive(a.parse(v)?)?;
                match &mut self.params {
                    Params::Speed(c) => c.threshold = x,
                    _ => self.training_mut().expect("rotation").threshold = x,
                }
            }
            "max_iters" => {
                let n = a.parse(v)?;
                match &mut self.params {
                    Params::Speed(c) => c.max_iters = n,
                    _ => self.training_mut().expect("rotation").max_iters = n,
                }
            }
            "loss_reduction" => {
                let r: LossReduction = a.parse(v)?;
                match &mut self.params {
                    Params::Speed(c) => c.reduction = r,
                    _ => self.training_mut().expect("rotation").reduction = r,
                }
            }
            "update_mode" => {
                let m: UpdateMode = a.parse(v)?;
                match &mut self.params {
                    Params::Speed(c) => c.update_mode = m,
                    _ => self.training_mut().expect("rotation").update_mode = m,
                }
            }
            "history_stride" => {
                let n = a.at_least(a.parse(v)?, 1)?;
                match &mut self.params {
                    Params::Speed(c) => c.history_stride = n,
                    _ => self.training_mut().expect("rotation").history_stride = n,
                }
            }
            "shared_init" => self.training_mut().expect("rotation").shared_init = a.parse(v)?,
            "hidden" => {
                let widths = list(v)
                    .map(|w| a.parse::<usize>(w).and_then(|w| a.at_least(w, 1)))
                    .collect::<Result<Vec<_>, _>>()?;
                if widths.is_empty() {
                    return Err(a.out_of_range("need at least one hidden layer"));
                }
                self.training_mut().expect("rotation").hidden = widths;
            }
            key => match (&mut self.params, key) {
                (Params::Speed(c), "models") => {
                    let mut models = Vec::new();
                    for part in list(v) {
                        let m = a.parse::<OrderingMode>(part)?;
                        if !models.contains(&m) {
                            models.push(m);
                        }
                    }
                    if models.is_empty() {
                        return Err(a.out_of_range("need at least one model"));
                    }
                    c.models = models;
                }
                (Params::Speed(c), "init_range") => c.init_range = a.positive(a.parse(v)?)?,
                (Params::Lines(c), "points") => c.points = a.at_least(a.parse(v)?, 1)?,
                (Params::Lines(c), "extent") => c.extent = a.positive(a.parse(v)?)?,
                (Params::Lines(c), "activation") => c.activation = a.parse::<Activation>(v)?,
                (Params::Cloud(c), "train_points") => c.train_points = a.at_least(a.parse(v)?, 1)?,
                (Params::Cloud(c), "test_points") => c.test_points = a.at_least(a.parse(v)?, 4)?,
                (Params::Cloud(c), "sampling") => c.sampling = a.parse::<Sampling>(v)?,
                _ => unreachable!("key list and setter disagree on '{key}'"),
            },
        }
        Ok(())
    }

    /// Canonical `key=value` lines for every experiment key (no output keys).
    pub fn echo(&self) -> Vec<String> {
        let mut lines = vec![format!("experiment={}", self.experiment)];
        let mut push = |k: &str, v: String| lines.push(format!("{k}={v}"));
        let join = |xs: &[usize]| xs.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        match &self.params {
            Params::Speed(c) => {
                push("seed", c.base_seed.to_string());
                push("trials", c.trials.to_string());
                push("epsilon", c.learning_rate.to_string());
                push("threshold", c.threshold.to_string());
                push("max_iters", c.max_iters.to_string());
                push("loss_reduction", c.reduction.to_string());
                push("update_mode", c.update_mode.to_string());
                push("history_stride", c.history_stride.to_string());
                let models: Vec<&str> = c.models.iter().map(|m| m.name()).collect();
                push("models", models.join(","));
                push("init_range", c.init_range.to_string());
            }
            Params::Lines(LineRotationConfig { training: t, .. })
            | Params::Cloud(CloudRotationConfig { training: t, .. }) => {
                push("seed", t.base_seed.to_string());
                push("trials", t.trials.to_string());
                push("epsilon", t.learning_rate.to_string());
                push("threshold", t.threshold.to_string());
                push("max_iters", t.max_iters.to_string());
                push("loss_reduction", t.reduction.to_string());
                push("update_mode", t.update_mode.to_string());
                push("history_stride", t.history_stride.to_string());
                match &self.params {
                    Params::Lines(c) => {
                        push("points", c.points.to_string());
                        push("extent", c.extent.to_string());
                        push("hidden", join(&t.hidden));
                        push("activation", c.activation.to_string());
                    }
                    Params::Cloud(c) => {
                        push("train_points", c.train_points.to_string());
                        push("test_points", c.test_points.to_string());
                        push("hidden", join(&t.hidden));
                        push("sampling", c.sampling.to_string());
                    }
                    Params::Speed(_) => unreachable!(),
                }
                push("shared_init", t.shared_init.to_string());
            }
        }
        lines
    }
}

fn list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// One `key=value` with where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub key: String,
    pub value: String,
    pub location: String,
}

impl Assignment {
    pub fn flag(key: &str, value: impl Into<String>) -> Self {
        Self {
            key: key.to_string(),
            value: value.into(),
            location: format!("flag --{}", key.replace('_', "-")),
        }
    }

    fn parse<T: FromStr>(&self, v: &str) -> Result<T, ConfigError>
    where
        T::Err: fmt::Display,
    {
        v.parse::<T>().map_err(|e| ConfigError::Parse {
            location: self.location.clone(),
            message: format!("bad value for {}: {e}", self.key),
        })
    }

    fn out_of_range(&self, reason: &'static str) -> ConfigError {
        ConfigError::OutOfRange {
            location: self.location.clone(),
            key: self.key.clone(),
            value: self.value.clone(),
            reason,
        }
    }

    fn positive(&self, x: f64) -> Result<f64, ConfigError> {
        if x > 0.0 && x.is_finite() {
            Ok(x)
        } else {
            Err(self.out_of_range("must be positive and finite"))
        }
    }

    fn at_least(&self, n: usize, min: usize) -> Result<usize, ConfigError> {
        if n >= min {
            Ok(n)
        } else if min == 1 {
            Err(self.out_of_range("must be at least 1"))
        } else {
            Err(self.out_of_range("must be at least 4"))
        }
    }
}

/// Splits config text into assignments.
pub fn tokenize(text: &str, source: &str) -> Result<Vec<Assignment>, ConfigError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("");
        for token in content.split_whitespace() {
            let location = format!("{source}:{}", i + 1);
            let Some((key, value)) = token.split_once('=') else {
                return Err(ConfigError::Parse {
                    location,
                    message: format!("expected key=value, found '{token}'"),
                });
            };
            if key.is_empty() {
                return Err(ConfigError::Parse {
                    location,
                    message: "empty key".into(),
                });
            }
            out.push(Assignment {
                key: key.to_string(),
                value: value.to_string(),
                location,
            });
        }
    }
    Ok(out)
}

/// Resolves assignments in order. The last `experiment` picks the defaults.
pub fn resolve(assignments: &[Assignment]) -> Result<RunConfig, ConfigError> {
    let mut experiment = ExperimentId::default();
    for a in assignments.iter().filter(|a| a.key == "experiment") {
        experiment = a.parse(&a.value)?;
    }
    let mut cfg = RunConfig::defaults(experiment);
    for a in assignments {
        cfg.set(a)?;
    }
    Ok(cfg)
}

/// Parses file text, then applies `overrides` (typically from flags).
pub fn parse_config(text: &str, source: &str, overrides: &[Assignment]) -> Result<RunConfig, ConfigError> {
    let mut all = tokenize(text, source)?;
    all.extend_from_slice(overrides);
    resolve(&all)
}
