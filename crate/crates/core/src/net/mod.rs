//! Feedforward networks over reals or quaternions.
//!
//! A quaternion network multiplies each incoming signal by its weight either
//! as `weight * input` ([`OrderingMode::Rqnn`]) or `input * weight`
//! ([`OrderingMode::Qnn`]). Real networks use [`OrderingMode::Real`].
//!
//! Gradients follow the steepest-descent convention: a [`GradientSet`] holds
//! `-dE/dparam`, and an SGD step adds `lr * delta` to every parameter.

mod element;
pub mod init;
pub mod optim;
pub mod train;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use element::{flatten, group, Element};

use crate::quat::Quaternion;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetError {
    #[error("shape mismatch in {what}: expected {expected}, got {got}")]
    ShapeMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("mode mismatch: operation needs {expected} but network is {got}")]
    ModeMismatch {
        expected: OrderingMode,
        got: OrderingMode,
    },
    #[error("bad range: lo={lo} must be finite and below hi={hi}")]
    BadRange { lo: f64, hi: f64 },
    #[error("{0}")]
    Invalid(String),
}

/// Multiplication order of a network's weights and signals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderingMode {
    /// `U = sum W S + T` (weight times input).
    Rqnn,
    /// `U = sum S W + T` (input times weight).
    Qnn,
    /// Real-valued network.
    Real,
}

impl OrderingMode {
    pub fn name(self) -> &'static str {
        match self {
            OrderingMode::Rqnn => "rqnn",
            OrderingMode::Qnn => "qnn",
            OrderingMode::Real => "real",
        }
    }
}

impl fmt::Display for OrderingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OrderingMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rqnn" => Ok(OrderingMode::Rqnn),
            "qnn" => Ok(OrderingMode::Qnn),
            "real" => Ok(OrderingMode::Real),
            other => Err(format!("unknown model '{other}' (expected real, qnn or rqnn)")),
        }
    }
}

/// Real activation, applied to every component independently (split type).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Activation {
    SplitSigmoid,
    Identity,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::SplitSigmoid => 1.0 / (1.0 + (-x).exp()),
            Activation::Identity => x,
        }
    }

    /// Derivative expressed through the activation's output `y = f(x)`.
    #[inline]
    pub fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::SplitSigmoid => (1.0 - y) * y,
            Activation::Identity => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::SplitSigmoid => "sigmoid",
            Activation::Identity => "identity",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sigmoid" => Ok(Activation::SplitSigmoid),
            "identity" => Ok(Activation::Identity),
            other => Err(format!("unknown activation '{other}' (expected sigmoid or identity)")),
        }
    }
}

/// One fully connected layer. `weights` is row-major `n_out x n_in`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer<T> {
    pub n_in: usize,
    pub n_out: usize,
    pub weights: Vec<T>,
    pub biases: Vec<T>,
    pub activation: Activation,
}

pub type QuatLayer = Layer<Quaternion>;
pub type RealLayer = Layer<f64>;

impl<T: Element> Layer<T> {
    pub fn zeros(n_in: usize, n_out: usize, activation: Activation) -> Self {
        Self {
            n_in,
            n_out,
            weights: vec![T::default(); n_in * n_out],
            biases: vec![T::default(); n_out],
            activation,
        }
    }

    #[inline]
    pub fn weight(&self, out: usize, inp: usize) -> T {
        self.weights[out * self.n_in + inp]
    }

    /// Real parameter count.
    pub fn param_count(&self) -> usize {
        (self.weights.len() + self.biases.len()) * T::WIDTH
    }

    fn check(&self) -> Result<(), NetError> {
        if self.weights.len() != self.n_in * self.n_out {
            return Err(NetError::ShapeMismatch {
                what: "layer weights",
                expected: self.n_in * self.n_out,
                got: self.weights.len(),
            });
        }
        if self.biases.len() != self.n_out {
            return Err(NetError::ShapeMismatch {
                what: "layer biases",
                expected: self.n_out,
                got: self.biases.len(),
            });
        }
        if self.n_in == 0 || self.n_out == 0 {
            return Err(NetError::Invalid("layer widths must be positive".into()));
        }
        if !self.weights.iter().chain(&self.biases).all(|w| w.is_finite()) {
            return Err(NetError::Invalid("layer has non-finite parameters".into()));
        }
        Ok(())
    }
}

/// Real parameter count of a fully connected layout whose widths are
/// counted in elements of `element_width` reals each.
pub fn parameter_count(layout: &[usize], element_width: usize) -> usize {
    layout
        .windows(2)
        .map(|w| (w[0] * w[1] + w[1]) * element_width)
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network<T> {
    mode: OrderingMode,
    layers: Vec<Layer<T>>,
}

pub type QuatNetwork = Network<Quaternion>;
pub type RealNetwork = Network<f64>;

impl<T: Element> Network<T> {
    pub fn new(mode: OrderingMode, layers: Vec<Layer<T>>) -> Result<Self, NetError> {
        let real_mode = mode == OrderingMode::Real;
        if real_mode != (T::WIDTH == 1) {
            return Err(NetError::Invalid(format!(
                "mode {mode} is not valid for {}-component elements",
                T::WIDTH
            )));
        }
        if layers.is_empty() {
            return Err(NetError::Invalid("network needs at least one layer".into()));
        }
        for layer in &layers {
            layer.check()?;
        }
        for pair in layers.windows(2) {
            if pair[0].n_out != pair[1].n_in {
                return Err(NetError::ShapeMismatch {
                    what: "adjacent layer widths",
                    expected: pair[0].n_out,
                    got: pair[1].n_in,
                });
            }
        }
        Ok(Self { mode, layers })
    }

    pub fn mode(&self) -> OrderingMode {
        self.mode
    }

    pub fn layers(&self) -> &[Layer<T>] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer<T>] {
        &mut self.layers
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].n_in
    }

    pub fn output_width(&self) -> usize {
        self.layers[self.layers.len() - 1].n_out
    }

    /// Widths from input to output, in elements.
    pub fn layout(&self) -> Vec<usize> {
        std::iter::once(self.input_width())
            .chain(self.layers.iter().map(|l| l.n_out))
            .collect()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Layer::param_count).sum()
    }

    /// All real parameters, layer by layer, weights before biases.
    pub fn params_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for layer in &self.layers {
            for w in layer.weights.iter().chain(&layer.biases) {
                w.push_components(&mut out);
            }
        }
        out
    }

    /// Overwrites every real parameter, in [`Network::params_flat`] order.
    pub fn set_params_flat(&mut self, values: &[f64]) -> Result<(), NetError> {
        if values.len() != self.param_count() {
            return Err(NetError::ShapeMismatch {
                what: "parameter vector",
                expected: self.param_count(),
                got: values.len(),
            });
        }
        let mut rest = values;
        for layer in &mut self.layers {
            for w in layer.weights.iter_mut().chain(layer.biases.iter_mut()) {
                *w = T::from_components(rest);
                rest = &rest[T::WIDTH..];
            }
        }
        Ok(())
    }

    /// Calls `f(param, delta)` for every real parameter and its matching
    /// gradient component, in [`Network::params_flat`] order.
    pub fn zip_params_mut(
        &mut self,
        grads: &GradientSet<T>,
        mut f: impl FnMut(&mut f64, f64),
    ) -> Result<(), NetError> {
        grads.check_against(self)?;
        for (layer, g) in self.layers.iter_mut().zip(&grads.layers) {
            for (w, dw) in layer.weights.iter_mut().zip(&g.weights) {
                w.zip_apply(*dw, &mut f);
            }
            for (b, db) in layer.biases.iter_mut().zip(&g.biases) {
                b.zip_apply(*db, &mut f);
            }
        }
        Ok(())
    }

    #[inline]
    fn product(mode: OrderingMode, weight: T, signal: T) -> T {
        match mode {
            OrderingMode::Qnn => signal * weight,
            _ => weight * signal,
        }
    }

    /// Forward pass recording every layer's net input and output.
    pub fn forward(&self, input: &[T]) -> Result<ForwardTrace<T>, NetError> {
        self.check_input(input)?;
        let mut net_inputs = Vec::with_capacity(self.layers.len());
        let mut outputs: Vec<Vec<T>> = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let signal = outputs.last().map_or(input, Vec::as_slice);
            let u = self.layer_net_input(layer, signal);
            let y = u.iter().map(|x| x.map(|c| layer.activation.apply(c))).collect();
            net_inputs.push(u);
            outputs.push(y);
        }
        Ok(ForwardTrace {
            input: input.to_vec(),
            net_inputs,
            outputs,
        })
    }

    /// Forward pass returning only the network output.
    pub fn predict(&self, input: &[T]) -> Result<Vec<T>, NetError> {
        self.check_input(input)?;
        let mut signal = input.to_vec();
        for layer in &self.layers {
            let mut u = self.layer_net_input(layer, &signal);
            for x in &mut u {
                *x = x.map(|c| layer.activation.apply(c));
            }
            signal = u;
        }
        Ok(signal)
    }

    fn check_input(&self, input: &[T]) -> Result<(), NetError> {
        if input.len() != self.input_width() {
            return Err(NetError::ShapeMismatch {
                what: "network input",
                expected: self.input_width(),
                got: input.len(),
            });
        }
        Ok(())
    }

    fn layer_net_input(&self, layer: &Layer<T>, signal: &[T]) -> Vec<T> {
        let mode = self.mode;
        (0..layer.n_out)
            .map(|n| {
                let row = &layer.weights[n * layer.n_in..(n + 1) * layer.n_in];
                let mut acc = layer.biases[n];
                for (w, s) in row.iter().zip(signal) {
                    acc += Self::product(mode, *w, *s);
                }
                acc
            })
            .collect()
    }

    /// Exact gradient of the pattern loss for any mode.
    pub fn backward(
        &self,
        trace: &ForwardTrace<T>,
        targets: &[T],
    ) -> Result<GradientSet<T>, NetError> {
        if trace.outputs.len() != self.layers.len() {
            return Err(NetError::ShapeMismatch {
                what: "trace depth",
                expected: self.layers.len(),
                got: trace.outputs.len(),
            });
        }
        let output = trace.output();
        if targets.len() != output.len() {
            return Err(NetError::ShapeMismatch {
                what: "targets",
                expected: output.len(),
                got: targets.len(),
            });
        }
        let mode = self.mode;
        let last = self.layers.len() - 1;
        // Local error at the net input of the current layer: f'(U) (.) dE/dY, negated.
        let act = self.layers[last].activation;
        let mut local: Vec<T> = output
            .iter()
            .zip(targets)
            .map(|(o, t)| {
                let fprime = o.map(|y| act.derivative_from_output(y));
                fprime.hadamard(*t - *o)
            })
            .collect();

        let mut grads: Vec<LayerGrad<T>> = Vec::with_capacity(self.layers.len());
        for idx in (0..self.layers.len()).rev() {
            let layer = &self.layers[idx];
            let signal: &[T] = if idx == 0 {
                &trace.input
            } else {
                &trace.outputs[idx - 1]
            };
            let mut weights = Vec::with_capacity(layer.weights.len());
            for g in &local {
                for s in signal {
                    // Rqnn: dU/dW acts as W -> W S, adjoint G S*; Qnn: W -> S W, adjoint S* G.
                    weights.push(match mode {
                        OrderingMode::Qnn => s.conj() * *g,
                        _ => *g * s.conj(),
                    });
                }
            }
            grads.push(LayerGrad {
                weights,
                biases: local.clone(),
            });
            if idx == 0 {
                break;
            }
            let below = self.layers[idx - 1].activation;
            local = (0..layer.n_in)
                .map(|m| {
                    let mut back = T::default();
                    for (n, g) in local.iter().enumerate() {
                        let w = layer.weight(n, m);
                        back += match mode {
                            OrderingMode::Qnn => *g * w.conj(),
                            _ => w.conj() * *g,
                        };
                    }
                    let y = trace.outputs[idx - 1][m];
                    y.map(|c| below.derivative_from_output(c)).hadamard(back)
                })
                .collect();
        }
        grads.reverse();
        Ok(GradientSet { layers: grads })
    }

    fn expect_mode(&self, expected: OrderingMode) -> Result<(), NetError> {
        if self.mode != expected {
            return Err(NetError::ModeMismatch {
                expected,
                got: self.mode,
            });
        }
        Ok(())
    }
}

impl QuatNetwork {
    /// The same parameters under another quaternion ordering.
    pub fn with_mode(&self, mode: OrderingMode) -> Result<Self, NetError> {
        Network::new(mode, self.layers.clone())
    }

    pub fn backward_rqnn(
        &self,
        trace: &ForwardTrace<Quaternion>,
        targets: &[Quaternion],
    ) -> Result<GradientSet<Quaternion>, NetError> {
        self.expect_mode(OrderingMode::Rqnn)?;
        self.backward(trace, targets)
    }

    pub fn backward_qnn(
        &self,
        trace: &ForwardTrace<Quaternion>,
        targets: &[Quaternion],
    ) -> Result<GradientSet<Quaternion>, NetError> {
        self.expect_mode(OrderingMode::Qnn)?;
        self.backward(trace, targets)
    }
}

impl RealNetwork {
    pub fn backward_real(
        &self,
        trace: &ForwardTrace<f64>,
        targets: &[f64],
    ) -> Result<GradientSet<f64>, NetError> {
        self.expect_mode(OrderingMode::Real)?;
        self.backward(trace, targets)
    }

    /// Forward pass on quaternion-encoded data (4 reals per quaternion).
    pub fn predict_quat(&self, input: &[Quaternion]) -> Result<Vec<Quaternion>, NetError> {
        Ok(group(&self.predict(&flatten(input))?))
    }
}

/// Net inputs and outputs of every layer for one input pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace<T> {
    pub input: Vec<T>,
    pub net_inputs: Vec<Vec<T>>,
    pub outputs: Vec<Vec<T>>,
}

impl<T> ForwardTrace<T> {
    pub fn output(&self) -> &[T] {
        self.outputs.last().map_or(&[], Vec::as_slice)
    }

    pub fn depth(&self) -> usize {
        self.outputs.len()
    }
}

/// Pattern loss `1/2 sum |target - output|^2`.
pub fn loss<T: Element>(outputs: &[T], targets: &[T]) -> Result<f64, NetError> {
    if outputs.len() != targets.len() {
        return Err(NetError::ShapeMismatch {
            what: "loss operands",
            expected: targets.len(),
            got: outputs.len(),
        });
    }
    Ok(0.5
        * outputs
            .iter()
            .zip(targets)
            .map(|(o, t)| (*t - *o).norm_squared())
            .sum::<f64>())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrad<T> {
    pub weights: Vec<T>,
    pub biases: Vec<T>,
}

/// Descent directions `-dE/dparam`, shaped like the network's layers.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSet<T> {
    pub layers: Vec<LayerGrad<T>>,
}

impl<T: Element> GradientSet<T> {
    pub fn zeros_like(net: &Network<T>) -> Self {
        Self {
            layers: net
                .layers
                .iter()
                .map(|l| LayerGrad {
                    weights: vec![T::default(); l.weights.len()],
                    biases: vec![T::default(); l.biases.len()],
                })
                .collect(),
        }
    }

    /// `self += other * s`.
    pub fn add_scaled(&mut self, other: &GradientSet<T>, s: f64) {
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            for (x, y) in a.weights.iter_mut().zip(&b.weights) {
                *x += y.scale(s);
            }
            for (x, y) in a.biases.iter_mut().zip(&b.biases) {
                *x += y.scale(s);
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        for l in &mut self.layers {
            for x in l.weights.iter_mut().chain(l.biases.iter_mut()) {
                *x = x.scale(s);
            }
        }
    }

    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for l in &self.layers {
            for w in l.weights.iter().chain(&l.biases) {
                w.push_components(&mut out);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.flat().iter().all(|x| *x == 0.0)
    }

    fn check_against(&self, net: &Network<T>) -> Result<(), NetError> {
        if self.layers.len() != net.layers.len() {
            return Err(NetError::ShapeMismatch {
                what: "gradient depth",
                expected: net.layers.len(),
                got: self.layers.len(),
            });
        }
        for (g, l) in self.layers.iter().zip(&net.layers) {
            if g.weights.len() != l.weights.len() || g.biases.len() != l.biases.len() {
                return Err(NetError::ShapeMismatch {
                    what: "gradient layer",
                    expected: l.weights.len() + l.biases.len(),
                    got: g.weights.len() + g.biases.len(),
                });
            }
        }
        Ok(())
    }
}
