use super::{ExperimentError, TrialResult};

/// Mean and unbiased (n - 1) standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

impl MeanStd {
    /// `None` for an empty sample. A single value has std 0.
    pub fn of(xs: &[f64]) -> Option<MeanStd> {
        if xs.is_empty() {
            return None;
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let std = if xs.len() < 2 {
            0.0
        } else {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Some(MeanStd {
            mean,
            std,
            count: xs.len(),
        })
    }
}

/// Iteration statistics over a set of trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub trials: usize,
    pub converged: usize,
    /// Mean and std of iterations over converged trials only; NaN when none converged.
    pub mean_iters: f64,
    pub std_iters: f64,
    /// Set when fewer than two trials converged, so `std_iters` is 0 by convention.
    pub std_undefined: bool,
}

impl Summary {
    pub fn converged_frac(&self) -> f64 {
        self.converged as f64 / self.trials as f64
    }
}

pub fn summarize(results: &[TrialResult]) -> Result<Summary, ExperimentError> {
    if results.is_empty() {
        return Err(ExperimentError::EmptyResults);
    }
    let iters: Vec<f64> = results
        .iter()
        .filter_map(|r| r.iterations.map(|i| i as f64))
        .collect();
    let stats = MeanStd::of(&iters);
    Ok(Summary {
        trials: results.len(),
        converged: iters.len(),
        mean_iters: stats.map_or(f64::NAN, |s| s.mean),
        std_iters: stats.map_or(f64::NAN, |s| s.std),
        std_undefined: iters.len() < 2,
    })
}
