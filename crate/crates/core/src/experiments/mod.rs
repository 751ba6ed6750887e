//! Trial runners reproducing the learning-speed benchmark and the line and
//! point-cloud rotation experiments.
//!
//! Every trial derives its own seed from the base seed (see
//! [`crate::rng::trial_seed`]), so trials run in parallel and results are
//! identical for any thread count.

pub mod data;
pub mod rotation;
pub mod speed;
pub mod summary;

use std::time::Duration;

use thiserror::Error;

use crate::net::train::TrainOutcome;
use crate::net::{NetError, OrderingMode};
use crate::quat::QuatError;

pub use data::{cloud_datasets, line_datasets, table1_dataset, Sampling};
pub use rotation::{
    run_cloud_experiment, run_line_experiment, CloudReport, CloudRotationConfig, CloudVariant,
    LineReport, LineRotationConfig,
};
pub use speed::{run_speed_experiment, SpeedReport, SpeedTrialConfig};
pub use summary::{summarize, MeanStd, Summary};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Quat(#[from] QuatError),
    #[error("no trial results to summarize")]
    EmptyResults,
    #[error("invalid experiment configuration: {0}")]
    Config(String),
}

/// One model trained once.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub model: OrderingMode,
    pub trial: usize,
    pub seed: u64,
    /// First epoch with loss below the threshold; `None` marks a trial that hit the cap.
    pub iterations: Option<usize>,
    pub final_loss: f64,
    /// Decimated `(epoch, loss)` samples; never empty.
    pub history: Vec<(usize, f64)>,
    pub wall_time: Duration,
}

impl TrialResult {
    fn from_outcome(
        model: OrderingMode,
        trial: usize,
        seed: u64,
        outcome: TrainOutcome,
        wall_time: Duration,
    ) -> Self {
        Self {
            model,
            trial,
            seed,
            iterations: outcome.iterations,
            final_loss: outcome.final_loss,
            history: outcome.history,
            wall_time,
        }
    }

    pub fn converged(&self) -> bool {
        self.iterations.is_some()
    }
}
