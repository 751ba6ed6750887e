//! Training loops: online or full-batch updates until the dataset loss
//! drops below a threshold.

use std::fmt;
use std::str::FromStr;

use super::optim::{adam_step, sgd_step, AdamState};
use super::{loss, Element, GradientSet, NetError, Network};

/// How pattern losses combine into the dataset loss (and gradient).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LossReduction {
    #[default]
    Mean,
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateMode {
    /// One update per pattern, in dataset order.
    Online,
    /// One update per epoch from the reduced gradient over all patterns.
    Batch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizerKind {
    Sgd,
    Adam,
}

macro_rules! keyword_enum {
    ($ty:ident { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub fn name(self) -> &'static str {
                match self { $($ty::$variant => $name),+ }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }
        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($name => Ok($ty::$variant),)+
                    other => Err(format!(
                        "unknown value '{}' (expected one of: {})",
                        other,
                        [$($name),+].join(", ")
                    )),
                }
            }
        }
    };
}

keyword_enum!(LossReduction { Mean => "mean", Sum => "sum" });
keyword_enum!(UpdateMode { Online => "online", Batch => "batch" });
keyword_enum!(OptimizerKind { Sgd => "sgd", Adam => "adam" });

/// Input and target patterns of equal count.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    inputs: Vec<Vec<T>>,
    targets: Vec<Vec<T>>,
}

impl<T: Element> Dataset<T> {
    pub fn new(inputs: Vec<Vec<T>>, targets: Vec<Vec<T>>) -> Result<Self, NetError> {
        if inputs.len() != targets.len() {
            return Err(NetError::ShapeMismatch {
                what: "dataset targets",
                expected: inputs.len(),
                got: targets.len(),
            });
        }
        if inputs.is_empty() {
            return Err(NetError::Invalid("dataset is empty".into()));
        }
        Ok(Self { inputs, targets })
    }

    /// Dataset of single-element patterns.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (T, T)>) -> Result<Self, NetError> {
        let (inputs, targets) = pairs.into_iter().map(|(x, t)| (vec![x], vec![t])).unzip();
        Self::new(inputs, targets)
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn inputs(&self) -> &[Vec<T>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[Vec<T>] {
        &self.targets
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[T], &[T])> {
        self.inputs
            .iter()
            .zip(&self.targets)
            .map(|(x, t)| (x.as_slice(), t.as_slice()))
    }

    /// Maps every pattern element, e.g. to re-encode quaternions as reals.
    pub fn map<U: Element>(&self, f: impl Fn(&[T]) -> Vec<U>) -> Dataset<U> {
        Dataset {
            inputs: self.inputs.iter().map(|x| f(x)).collect(),
            targets: self.targets.iter().map(|t| f(t)).collect(),
        }
    }
}

fn reduce(total: f64, n: usize, reduction: LossReduction) -> f64 {
    match reduction {
        LossReduction::Mean => total / n as f64,
        LossReduction::Sum => total,
    }
}

pub fn dataset_loss<T: Element>(
    net: &Network<T>,
    data: &Dataset<T>,
    reduction: LossReduction,
) -> Result<f64, NetError> {
    let mut total = 0.0;
    for (x, t) in data.iter() {
        total += loss(&net.predict(x)?, t)?;
    }
    Ok(reduce(total, data.len(), reduction))
}

/// Dataset loss and the matching reduced descent direction.
pub fn batch_gradient<T: Element>(
    net: &Network<T>,
    data: &Dataset<T>,
    reduction: LossReduction,
) -> Result<(f64, GradientSet<T>), NetError> {
    let mut acc = GradientSet::zeros_like(net);
    let mut total = 0.0;
    for (x, t) in data.iter() {
        let trace = net.forward(x)?;
        total += loss(trace.output(), t)?;
        acc.add_scaled(&net.backward(&trace, t)?, 1.0);
    }
    if reduction == LossReduction::Mean {
        acc.scale(1.0 / data.len() as f64);
    }
    Ok((reduce(total, data.len(), reduction), acc))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub optimizer: OptimizerKind,
    pub learning_rate: f64,
    pub threshold: f64,
    pub max_epochs: usize,
    pub update_mode: UpdateMode,
    pub reduction: LossReduction,
    /// Record the loss every this many epochs (the last epoch is always kept).
    pub history_stride: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    /// First epoch whose loss fell below the threshold; `None` if the cap was hit.
    pub iterations: Option<usize>,
    pub final_loss: f64,
    /// `(epoch, loss)` samples.
    pub history: Vec<(usize, f64)>,
}

impl TrainOutcome {
    pub fn converged(&self) -> bool {
        self.iterations.is_some()
    }
}

enum Stepper {
    Sgd,
    Adam(AdamState),
}

impl Stepper {
    fn step<T: Element>(
        &mut self,
        net: &mut Network<T>,
        g: &GradientSet<T>,
        lr: f64,
    ) -> Result<(), NetError> {
        match self {
            Stepper::Sgd => sgd_step(net, g, lr),
            Stepper::Adam(state) => adam_step(state, net, g, lr),
        }
    }
}

/// Trains `net` in place. Epoch `e`'s loss is measured before its updates,
/// so a network that already meets the threshold reports 0 iterations.
pub fn train<T: Element>(
    net: &mut Network<T>,
    data: &Dataset<T>,
    cfg: &TrainConfig,
) -> Result<TrainOutcome, NetError> {
    let stride = cfg.history_stride.max(1);
    let mut stepper = match cfg.optimizer {
        OptimizerKind::Sgd => Stepper::Sgd,
        OptimizerKind::Adam => Stepper::Adam(AdamState::for_network(net)),
    };
    let mut history = Vec::new();
    for epoch in 0..=cfg.max_epochs {
        let (current, batch) = match cfg.update_mode {
            UpdateMode::Batch => {
                let (l, g) = batch_gradient(net, data, cfg.reduction)?;
                (l, Some(g))
            }
            UpdateMode::Online => (dataset_loss(net, data, cfg.reduction)?, None),
        };
        if !current.is_finite() {
            return Err(NetError::Invalid(format!("loss diverged at epoch {epoch}")));
        }
        let done = current < cfg.threshold;
        if epoch % stride == 0 || done || epoch == cfg.max_epochs {
            history.push((epoch, current));
        }
        if done {
            return Ok(TrainOutcome {
                iterations: Some(epoch),
                final_loss: current,
                history,
            });
        }
        if epoch == cfg.max_epochs {
            return Ok(TrainOutcome {
                iterations: None,
                final_loss: current,
                history,
            });
        }
        match batch {
            Some(g) => stepper.step(net, &g, cfg.learning_rate)?,
            None => {
                for (x, t) in data.iter() {
                    let trace = net.forward(x)?;
                    let g = net.backward(&trace, t)?;
                    stepper.step(net, &g, cfg.learning_rate)?;
                }
            }
        }
    }
    unreachable!("loop returns on its last epoch")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{Activation, Layer, OrderingMode};

    fn linear(w: f64) -> Network<f64> {
        let layer = Layer {
            n_in: 1,
            n_out: 1,
            weights: vec![w],
            biases: vec![0.0],
            activation: Activation::Identity,
        };
        Network::new(OrderingMode::Real, vec![layer]).unwrap()
    }

    fn cfg(update_mode: UpdateMode) -> TrainConfig {
        TrainConfig {
            optimizer: OptimizerKind::Sgd,
            learning_rate: 0.1,
            threshold: 1e-6,
            max_epochs: 10_000,
            update_mode,
            reduction: LossReduction::Mean,
            history_stride: 1,
        }
    }

    #[test]
    fn converges_on_a_line() {
        let data = Dataset::from_pairs([(1.0, 2.0), (2.0, 4.0)]).unwrap();
        for mode in [UpdateMode::Online, UpdateMode::Batch] {
            let mut net = linear(0.0);
            let out = train(&mut net, &data, &cfg(mode)).unwrap();
            let it = out.iterations.unwrap();
            assert!(out.final_loss < 1e-6);
            // first index below threshold
            assert!(out.history.iter().filter(|(e, _)| *e < it).all(|(_, l)| *l >= 1e-6));
            assert_eq!(out.history.len(), it + 1);
        }
    }

    #[test]
    fn already_converged_reports_zero() {
        let data = Dataset::from_pairs([(1.0, 2.0)]).unwrap();
        let mut net = linear(2.0);
        let out = train(&mut net, &data, &cfg(UpdateMode::Online)).unwrap();
        assert_eq!(out.iterations, Some(0));
    }

    #[test]
    fn cap_marks_non_convergence() {
        let data = Dataset::from_pairs([(1.0, 2.0)]).unwrap();
        let mut net = linear(0.0);
        let mut c = cfg(UpdateMode::Batch);
        c.max_epochs = 3;
        c.learning_rate = 1e-3;
        let out = train(&mut net, &data, &c).unwrap();
        assert_eq!(out.iterations, None);
        assert_eq!(out.history.last().unwrap().0, 3);
    }

    #[test]
    fn sum_and_mean_reductions() {
        let data = Dataset::from_pairs([(1.0, 2.0), (1.0, 0.0)]).unwrap();
        let net = linear(0.0);
        let mean = dataset_loss(&net, &data, LossReduction::Mean).unwrap();
        let sum = dataset_loss(&net, &data, LossReduction::Sum).unwrap();
        assert_eq!(sum, 2.0);
        assert_eq!(mean, 1.0);
        let (l, g) = batch_gradient(&net, &data, LossReduction::Mean).unwrap();
        assert_eq!(l, 1.0);
        assert_eq!(g.layers[0].weights[0], 1.0);
    }

    #[test]
    fn dataset_shape_checks() {
        assert!(Dataset::<f64>::new(vec![vec![1.0]], vec![]).is_err());
        assert!(Dataset::<f64>::new(vec![], vec![]).is_err());
    }
}
