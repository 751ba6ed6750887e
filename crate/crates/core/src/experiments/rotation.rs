//! Rotation experiments: a QNN and an RQNN start from the same weights,
//! learn the same rotation, and are compared on unseen test points.
//!
//! Network outputs are read as 3D points through their imaginary parts;
//! the scalar part is ignored by every angle and Euler measurement.

use std::time::Instant;

use rayon::prelude::*;

use super::data::{cloud_datasets, line_datasets, Sampling, TRACKED_VERTICES};
use super::summary::MeanStd;
use super::{ExperimentError, TrialResult};
use crate::net::init::{build_network, shapes, InitScheme};
use crate::net::train::{train, Dataset, LossReduction, OptimizerKind, TrainConfig, UpdateMode};
use crate::net::{Activation, OrderingMode, QuatNetwork};
use crate::quat::{angle_between, rotation_between, to_euler, EulerAngles, Quaternion, Vec3};
use crate::rng::trial_seed;

/// Settings shared by both rotation experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationTraining {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub threshold: f64,
    pub max_iters: usize,
    pub trials: usize,
    /// Start the QNN and the RQNN of a trial from bit-identical weights.
    pub shared_init: bool,
    pub base_seed: u64,
    pub update_mode: UpdateMode,
    pub reduction: LossReduction,
    pub history_stride: usize,
}

impl RotationTraining {
    fn train_config(&self) -> TrainConfig {
        TrainConfig {
            optimizer: OptimizerKind::Adam,
            learning_rate: self.learning_rate,
            threshold: self.threshold,
            max_epochs: self.max_iters,
            update_mode: self.update_mode,
            reduction: self.reduction,
            history_stride: self.history_stride,
        }
    }

    fn layout(&self) -> Vec<usize> {
        let mut l = vec![1];
        l.extend(&self.hidden);
        l.push(1);
        l
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        if self.trials == 0 {
            return Err(ExperimentError::Config("trials must be positive".into()));
        }
        if self.hidden.contains(&0) {
            return Err(ExperimentError::Config("hidden widths must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineRotationConfig {
    pub points: usize,
    /// Points sit at `extent * p / points`, `p = 1..=points`.
    pub extent: f64,
    pub activation: Activation,
    pub training: RotationTraining,
}

impl Default for LineRotationConfig {
    fn default() -> Self {
        Self {
            points: 200,
            extent: 1.0,
            activation: Activation::Identity,
            training: RotationTraining {
                hidden: vec![30, 60, 30],
                learning_rate: 0.05,
                threshold: 0.01,
                max_iters: 50_000,
                trials: 50,
                shared_init: true,
                base_seed: 0,
                update_mode: UpdateMode::Batch,
                reduction: LossReduction::Mean,
                history_stride: 1,
            },
        }
    }
}

/// Activation layout of the cloud networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloudVariant {
    /// Identity everywhere.
    Linear,
    /// Split sigmoid on hidden layers, identity output.
    SigmoidHidden,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CloudRotationConfig {
    pub train_points: usize,
    pub test_points: usize,
    pub sampling: Sampling,
    pub variant: CloudVariant,
    pub training: RotationTraining,
}

impl Default for CloudRotationConfig {
    fn default() -> Self {
        Self {
            train_points: 5000,
            test_points: 5000,
            sampling: Sampling::Random,
            variant: CloudVariant::Linear,
            training: RotationTraining {
                hidden: vec![25, 50],
                learning_rate: 0.05,
                threshold: 0.01,
                max_iters: 50_000,
                trials: 10,
                shared_init: true,
                base_seed: 0,
                update_mode: UpdateMode::Batch,
                reduction: LossReduction::Mean,
                history_stride: 1,
            },
        }
    }
}

/// Per-point comparison of a test input with both models' outputs. Angles
/// are `None` where an output has no imaginary direction.
#[derive(Debug, Clone, PartialEq)]
pub struct PointComparison {
    pub input: Vec3,
    pub qnn_out: Quaternion,
    pub rqnn_out: Quaternion,
    pub angle_qnn_rqnn: Option<f64>,
    pub angle_qnn_input: Option<f64>,
    pub angle_rqnn_input: Option<f64>,
    pub euler_qnn: Option<EulerAngles>,
    pub euler_rqnn: Option<EulerAngles>,
}

impl PointComparison {
    fn new(input: Vec3, qnn_out: Quaternion, rqnn_out: Quaternion) -> Self {
        let (q, r) = (qnn_out.vector(), rqnn_out.vector());
        let euler = |out: Vec3| rotation_between(input, out).and_then(to_euler).ok();
        Self {
            input,
            qnn_out,
            rqnn_out,
            angle_qnn_rqnn: angle_between(q, r).ok(),
            angle_qnn_input: angle_between(q, input).ok(),
            angle_rqnn_input: angle_between(r, input).ok(),
            euler_qnn: euler(q),
            euler_rqnn: euler(r),
        }
    }
}

/// Mean of each angle family over the points where it is defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleMeans {
    pub qnn_rqnn: f64,
    pub qnn_input: f64,
    pub rqnn_input: f64,
}

impl AngleMeans {
    fn of(points: &[PointComparison]) -> Self {
        let mean = |f: fn(&PointComparison) -> Option<f64>| {
            let xs: Vec<f64> = points.iter().filter_map(f).collect();
            MeanStd::of(&xs).map_or(f64::NAN, |s| s.mean)
        };
        Self {
            qnn_rqnn: mean(|p| p.angle_qnn_rqnn),
            qnn_input: mean(|p| p.angle_qnn_input),
            rqnn_input: mean(|p| p.angle_rqnn_input),
        }
    }
}

/// A trained QNN/RQNN pair from one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct PairTrial {
    pub trial: usize,
    pub seed: u64,
    pub qnn: TrialResult,
    pub rqnn: TrialResult,
    pub qnn_net: QuatNetwork,
    pub rqnn_net: QuatNetwork,
    /// Test-set comparison, in test-input order.
    pub points: Vec<PointComparison>,
    pub angles: AngleMeans,
}

impl PairTrial {
    pub fn both_converged(&self) -> bool {
        self.qnn.converged() && self.rqnn.converged()
    }
}

fn train_pair(
    training: &RotationTraining,
    hidden_act: Activation,
    output_act: Activation,
    data: &Dataset<Quaternion>,
    test_in: &[Quaternion],
    trial: usize,
) -> Result<PairTrial, ExperimentError> {
    let seed = trial_seed(training.base_seed, trial);
    let layer_shapes = shapes(&training.layout(), hidden_act, output_act);
    let rqnn_seed = if training.shared_init {
        seed
    } else {
        trial_seed(seed, usize::MAX)
    };
    let cfg = training.train_config();
    let run = |mode: OrderingMode, init_seed: u64| -> Result<_, ExperimentError> {
        let mut net = build_network::<Quaternion>(mode, &layer_shapes, InitScheme::Xavier, init_seed)?;
        let start = Instant::now();
        let outcome = train(&mut net, data, &cfg)?;
        let result = TrialResult::from_outcome(mode, trial, init_seed, outcome, start.elapsed());
        Ok((net, result))
    };
    let (qnn_net, qnn) = run(OrderingMode::Qnn, seed)?;
    let (rqnn_net, rqnn) = run(OrderingMode::Rqnn, rqnn_seed)?;

    let points = test_in
        .iter()
        .map(|x| {
            let q = qnn_net.predict(std::slice::from_ref(x))?[0];
            let r = rqnn_net.predict(std::slice::from_ref(x))?[0];
            Ok(PointComparison::new(x.vector(), q, r))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let angles = AngleMeans::of(&points);
    Ok(PairTrial {
        trial,
        seed,
        qnn,
        rqnn,
        qnn_net,
        rqnn_net,
        points,
        angles,
    })
}

/// Mean and std across trials of each per-trial angle mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleSummary {
    pub qnn_rqnn: Option<MeanStd>,
    pub qnn_input: Option<MeanStd>,
    pub rqnn_input: Option<MeanStd>,
}

impl AngleSummary {
    fn over(trials: &[&PairTrial]) -> Self {
        let stat = |f: fn(&AngleMeans) -> f64| {
            let xs: Vec<f64> = trials.iter().map(|t| f(&t.angles)).filter(|x| x.is_finite()).collect();
            MeanStd::of(&xs)
        };
        Self {
            qnn_rqnn: stat(|a| a.qnn_rqnn),
            qnn_input: stat(|a| a.qnn_input),
            rqnn_input: stat(|a| a.rqnn_input),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineTrial {
    pub pair: PairTrial,
    /// Rotation from the test line's direction to each output line's
    /// direction (centroids of the imaginary parts).
    pub line_euler_qnn: Option<EulerAngles>,
    pub line_euler_rqnn: Option<EulerAngles>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineReport {
    pub trials: Vec<LineTrial>,
    /// Over trials where both models converged.
    pub angles: AngleSummary,
}

impl LineReport {
    pub fn converged_pairs(&self) -> usize {
        self.trials.iter().filter(|t| t.pair.both_converged()).count()
    }
}

fn centroid(vs: impl Iterator<Item = Vec3>) -> Vec3 {
    let (sum, n) = vs.fold((Vec3::default(), 0usize), |(s, n), v| (s + v, n + 1));
    sum.scale(1.0 / n.max(1) as f64)
}

pub fn run_line_experiment(cfg: &LineRotationConfig) -> Result<LineReport, ExperimentError> {
    cfg.training.validate()?;
    if cfg.points == 0 || !(cfg.extent > 0.0) {
        return Err(ExperimentError::Config("points and extent must be positive".into()));
    }
    let d = line_datasets(cfg.points, cfg.extent);
    let data = Dataset::from_pairs(d.train_in.iter().copied().zip(d.train_target.iter().copied()))?;
    let trials = (0..cfg.training.trials)
        .into_par_iter()
        .map(|t| {
            let pair = train_pair(&cfg.training, cfg.activation, cfg.activation, &data, &d.test_in, t)?;
            let test_dir = centroid(pair.points.iter().map(|p| p.input));
            let line_euler = |f: fn(&PointComparison) -> Quaternion| {
                let out = centroid(pair.points.iter().map(|p| f(p).vector()));
                rotation_between(test_dir, out).and_then(to_euler).ok()
            };
            Ok(LineTrial {
                line_euler_qnn: line_euler(|p| p.qnn_out),
                line_euler_rqnn: line_euler(|p| p.rqnn_out),
                pair,
            })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let converged: Vec<&PairTrial> = trials
        .iter()
        .map(|t| &t.pair)
        .filter(|p| p.both_converged())
        .collect();
    Ok(LineReport {
        angles: AngleSummary::over(&converged),
        trials,
    })
}

/// Euler decompositions of one tracked vertex's motion under both models.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexRotation {
    pub name: &'static str,
    pub point: PointComparison,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CloudTrial {
    pub pair: PairTrial,
    pub vertices: Vec<VertexRotation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CloudReport {
    pub trials: Vec<CloudTrial>,
    pub angles: AngleSummary,
}

pub fn run_cloud_experiment(cfg: &CloudRotationConfig) -> Result<CloudReport, ExperimentError> {
    cfg.training.validate()?;
    if cfg.train_points == 0 || cfg.test_points < TRACKED_VERTICES.len() {
        return Err(ExperimentError::Config(format!(
            "need at least one training point and {} test points",
            TRACKED_VERTICES.len()
        )));
    }
    let (hidden_act, output_act) = match cfg.variant {
        CloudVariant::Linear => (Activation::Identity, Activation::Identity),
        CloudVariant::SigmoidHidden => (Activation::SplitSigmoid, Activation::Identity),
    };
    let trials = (0..cfg.training.trials)
        .into_par_iter()
        .map(|t| {
            let seed = trial_seed(cfg.training.base_seed, t);
            let d = cloud_datasets(cfg.train_points, cfg.test_points, cfg.sampling, seed);
            let data = Dataset::from_pairs(d.train_in.iter().copied().zip(d.train_target.iter().copied()))?;
            let pair = train_pair(&cfg.training, hidden_act, output_act, &data, &d.test_in, t)?;
            let vertices = TRACKED_VERTICES
                .iter()
                .zip(&pair.points)
                .map(|((name, _), p)| VertexRotation {
                    name,
                    point: p.clone(),
                })
                .collect();
            Ok(CloudTrial { pair, vertices })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let converged: Vec<&PairTrial> = trials
        .iter()
        .map(|t| &t.pair)
        .filter(|p| p.both_converged())
        .collect();
    Ok(CloudReport {
        angles: AngleSummary::over(&converged),
        trials,
    })
}
