//! Learning-speed benchmark: the four-pattern task learned by a 4-8-4 real
//! network and 1-6-1 networks in both quaternion orderings, all with 76
//! real parameters.

use std::time::Instant;

use rayon::prelude::*;

use super::data::table1_dataset;
use super::summary::{summarize, Summary};
use super::{ExperimentError, TrialResult};
use crate::net::init::{build_network, shapes, InitScheme};
use crate::net::train::{
    train, Dataset, LossReduction, OptimizerKind, TrainConfig, UpdateMode,
};
use crate::net::{flatten, Activation, Element, OrderingMode};
use crate::quat::Quaternion;
use crate::rng::trial_seed;

pub const REAL_LAYOUT: [usize; 3] = [4, 8, 4];
pub const QUAT_LAYOUT: [usize; 3] = [1, 6, 1];

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedTrialConfig {
    pub models: Vec<OrderingMode>,
    pub learning_rate: f64,
    /// Initial components are uniform on `[-init_range, init_range)`.
    pub init_range: f64,
    pub threshold: f64,
    pub max_iters: usize,
    pub trials: usize,
    pub base_seed: u64,
    pub update_mode: UpdateMode,
    pub reduction: LossReduction,
    pub history_stride: usize,
}

impl Default for SpeedTrialConfig {
    fn default() -> Self {
        Self {
            models: vec![OrderingMode::Real, OrderingMode::Qnn, OrderingMode::Rqnn],
            learning_rate: 0.1,
            init_range: 0.3,
            threshold: 0.01,
            max_iters: 100_000,
            trials: 100,
            base_seed: 0,
            update_mode: UpdateMode::Online,
            reduction: LossReduction::Mean,
            history_stride: 10,
        }
    }
}

impl SpeedTrialConfig {
    pub fn layout(model: OrderingMode) -> &'static [usize] {
        match model {
            OrderingMode::Real => &REAL_LAYOUT,
            _ => &QUAT_LAYOUT,
        }
    }

    fn train_config(&self) -> TrainConfig {
        TrainConfig {
            optimizer: OptimizerKind::Sgd,
            learning_rate: self.learning_rate,
            threshold: self.threshold,
            max_epochs: self.max_iters,
            update_mode: self.update_mode,
            reduction: self.reduction,
            history_stride: self.history_stride,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedReport {
    /// Trials grouped by model in `models` order, then by trial index.
    pub trials: Vec<TrialResult>,
    pub summaries: Vec<(OrderingMode, Summary)>,
}

impl SpeedReport {
    pub fn summary(&self, model: OrderingMode) -> Option<&Summary> {
        self.summaries.iter().find(|(m, _)| *m == model).map(|(_, s)| s)
    }
}

fn run_one<T: Element>(
    model: OrderingMode,
    data: &Dataset<T>,
    cfg: &SpeedTrialConfig,
    trial: usize,
) -> Result<TrialResult, ExperimentError> {
    let seed = trial_seed(cfg.base_seed, trial);
    let layer_shapes = shapes(
        SpeedTrialConfig::layout(model),
        Activation::SplitSigmoid,
        Activation::SplitSigmoid,
    );
    let scheme = InitScheme::Uniform {
        lo: -cfg.init_range,
        hi: cfg.init_range,
    };
    let mut net = build_network::<T>(model, &layer_shapes, scheme, seed)?;
    let start = Instant::now();
    let outcome = train(&mut net, data, &cfg.train_config())?;
    Ok(TrialResult::from_outcome(model, trial, seed, outcome, start.elapsed()))
}

pub fn run_speed_experiment(cfg: &SpeedTrialConfig) -> Result<SpeedReport, ExperimentError> {
    if cfg.trials == 0 || cfg.models.is_empty() {
        return Err(ExperimentError::Config("need at least one model and one trial".into()));
    }
    if !(cfg.init_range > 0.0) {
        return Err(ExperimentError::Config("init_range must be positive".into()));
    }
    let quat = Dataset::from_pairs(table1_dataset())?;
    let real = quat.map(|q: &[Quaternion]| flatten(q));

    let jobs: Vec<(OrderingMode, usize)> = cfg
        .models
        .iter()
        .flat_map(|m| (0..cfg.trials).map(move |t| (*m, t)))
        .collect();
    let trials = jobs
        .par_iter()
        .map(|&(model, trial)| match model {
            OrderingMode::Real => run_one(model, &real, cfg, trial),
            _ => run_one(model, &quat, cfg, trial),
        })
        .collect::<Result<Vec<_>, _>>()?;

    let summaries = cfg
        .models
        .iter()
        .map(|m| {
            let mine: Vec<TrialResult> =
                trials.iter().filter(|t| t.model == *m).cloned().collect();
            summarize(&mine).map(|s| (*m, s))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SpeedReport { trials, summaries })
}
