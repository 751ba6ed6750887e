//! Parameter initializers. Components are drawn weights first (row-major,
//! `a, b, c, d` within a quaternion), then biases.

use rand::RngExt;

use super::{Activation, Element, Layer, NetError, Network, OrderingMode};
use crate::rng::{layer_rng, StreamRng};

/// Width and activation of a layer to be initialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerShape {
    pub n_in: usize,
    pub n_out: usize,
    pub activation: Activation,
}

fn draw<T: Element>(rng: &mut StreamRng, lo: f64, hi: f64) -> T {
    let mut buf = [0.0; 4];
    for slot in buf.iter_mut().take(T::WIDTH) {
        *slot = rng.random_range(lo..hi);
    }
    T::from_components(&buf)
}

/// Every weight and bias component i.i.d. uniform on `[lo, hi)`.
pub fn init_uniform<T: Element>(
    shape: LayerShape,
    lo: f64,
    hi: f64,
    rng: &mut StreamRng,
) -> Result<Layer<T>, NetError> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(NetError::BadRange { lo, hi });
    }
    let weights = (0..shape.n_in * shape.n_out).map(|_| draw(rng, lo, hi)).collect();
    let biases = (0..shape.n_out).map(|_| draw(rng, lo, hi)).collect();
    Ok(Layer {
        n_in: shape.n_in,
        n_out: shape.n_out,
        weights,
        biases,
        activation: shape.activation,
    })
}

/// Glorot bound `sqrt(6 / (fan_in + fan_out))` with fans counted in real
/// components.
pub fn xavier_limit<T: Element>(n_in: usize, n_out: usize) -> f64 {
    (6.0 / ((n_in + n_out) * T::WIDTH) as f64).sqrt()
}

/// Weights uniform on `[-L, L)` with `L` from [`xavier_limit`]; zero biases.
pub fn init_xavier_uniform<T: Element>(shape: LayerShape, rng: &mut StreamRng) -> Layer<T> {
    let l = xavier_limit::<T>(shape.n_in, shape.n_out);
    let weights = (0..shape.n_in * shape.n_out).map(|_| draw(rng, -l, l)).collect();
    Layer {
        n_in: shape.n_in,
        n_out: shape.n_out,
        weights,
        biases: vec![T::default(); shape.n_out],
        activation: shape.activation,
    }
}

/// How to initialize a whole network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitScheme {
    Uniform { lo: f64, hi: f64 },
    Xavier,
}

/// Shapes for `layout` with `hidden` on every layer but the last.
pub fn shapes(layout: &[usize], hidden: Activation, output: Activation) -> Vec<LayerShape> {
    let n = layout.len().saturating_sub(1);
    layout
        .windows(2)
        .enumerate()
        .map(|(i, w)| LayerShape {
            n_in: w[0],
            n_out: w[1],
            activation: if i + 1 == n { output } else { hidden },
        })
        .collect()
}

/// Builds a network whose layer `k` draws from stream `k` of `seed`, so two
/// networks built from the same seed and shapes start bit-identical.
pub fn build_network<T: Element>(
    mode: OrderingMode,
    shapes: &[LayerShape],
    scheme: InitScheme,
    seed: u64,
) -> Result<Network<T>, NetError> {
    let layers = shapes
        .iter()
        .enumerate()
        .map(|(k, shape)| {
            let mut rng = layer_rng(seed, k);
            match scheme {
                InitScheme::Uniform { lo, hi } => init_uniform(*shape, lo, hi, &mut rng),
                InitScheme::Xavier => Ok(init_xavier_uniform(*shape, &mut rng)),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Network::new(mode, layers)
}
