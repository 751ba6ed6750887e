//! Steepest descent and Adam over a network's real parameters.

use super::{Element, GradientSet, NetError, Network};

/// `param += lr * delta` for every real parameter.
pub fn sgd_step<T: Element>(
    net: &mut Network<T>,
    grads: &GradientSet<T>,
    lr: f64,
) -> Result<(), NetError> {
    net.zip_params_mut(grads, |p, d| *p += lr * d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// First and second moment estimates, one slot per real parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(param_count: usize, config: AdamConfig) -> Self {
        Self {
            config,
            m: vec![0.0; param_count],
            v: vec![0.0; param_count],
            t: 0,
        }
    }

    pub fn for_network<T: Element>(net: &Network<T>) -> Self {
        Self::new(net.param_count(), AdamConfig::default())
    }

    /// One bias-corrected Adam update of `params` with loss gradient `grad`.
    pub fn update_slice(&mut self, params: &mut [f64], grad: &[f64], lr: f64) -> Result<(), NetError> {
        if params.len() != self.m.len() || grad.len() != self.m.len() {
            return Err(NetError::ShapeMismatch {
                what: "adam state",
                expected: self.m.len(),
                got: params.len().min(grad.len()),
            });
        }
        self.t += 1;
        let (c1, c2) = self.corrections();
        for (i, (p, g)) in params.iter_mut().zip(grad).enumerate() {
            *p -= self.moment_step(i, *g, lr, c1, c2);
        }
        Ok(())
    }

    fn corrections(&self) -> (f64, f64) {
        let t = self.t as i32;
        (
            1.0 - self.config.beta1.powi(t),
            1.0 - self.config.beta2.powi(t),
        )
    }

    #[inline]
    fn moment_step(&mut self, i: usize, g: f64, lr: f64, c1: f64, c2: f64) -> f64 {
        let AdamConfig { beta1, beta2, eps } = self.config;
        self.m[i] = beta1 * self.m[i] + (1.0 - beta1) * g;
        self.v[i] = beta2 * self.v[i] + (1.0 - beta2) * g * g;
        let m_hat = self.m[i] / c1;
        let v_hat = self.v[i] / c2;
        lr * m_hat / (v_hat.sqrt() + eps)
    }
}

/// Adam step on a network. The loss gradient is `-delta`.
pub fn adam_step<T: Element>(
    state: &mut AdamState,
    net: &mut Network<T>,
    grads: &GradientSet<T>,
    lr: f64,
) -> Result<(), NetError> {
    if state.m.len() != net.param_count() {
        return Err(NetError::ShapeMismatch {
            what: "adam state",
            expected: net.param_count(),
            got: state.m.len(),
        });
    }
    state.t += 1;
    let (c1, c2) = state.corrections();
    let mut i = 0;
    net.zip_params_mut(grads, |p, d| {
        *p -= state.moment_step(i, -d, lr, c1, c2);
        i += 1;
    })
}
