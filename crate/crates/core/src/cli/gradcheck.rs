//! Central-difference check of the analytic gradients on random networks.

use rand::RngExt;

use crate::net::init::{build_network, InitScheme, LayerShape};
use crate::net::{loss, Activation, Element, NetError, Network, OrderingMode};
use crate::quat::Quaternion;
use crate::rng::{stream_rng, StreamRng};

pub const FD_STEP: f64 = 1e-6;
/// Relative errors use `max(|a|, |n|, REL_FLOOR)` as the denominator.
pub const REL_FLOOR: f64 = 0.1;

/// Descent direction `-dE/dp` by central differences, in `params_flat` order.
pub fn numeric_descent<T: Element>(net: &Network<T>, x: &[T], t: &[T]) -> Result<Vec<f64>, NetError> {
    let base = net.params_flat();
    let mut probe = net.clone();
    let mut out = Vec::with_capacity(base.len());
    let mut p = base.clone();
    for i in 0..base.len() {
        p[i] = base[i] + FD_STEP;
        probe.set_params_flat(&p)?;
        let up = loss(&probe.predict(x)?, t)?;
        p[i] = base[i] - FD_STEP;
        probe.set_params_flat(&p)?;
        let down = loss(&probe.predict(x)?, t)?;
        p[i] = base[i];
        out.push(-(up - down) / (2.0 * FD_STEP));
    }
    Ok(out)
}

fn random_instance<T: Element>(
    mode: OrderingMode,
    activation: Activation,
    rng: &mut StreamRng,
) -> Result<(Network<T>, Vec<T>, Vec<T>), NetError> {
    let depth = rng.random_range(1..=4);
    let widths: Vec<usize> = (0..=depth).map(|_| rng.random_range(1..=8)).collect();
    let shapes: Vec<LayerShape> = widths
        .windows(2)
        .map(|w| LayerShape {
            n_in: w[0],
            n_out: w[1],
            activation,
        })
        .collect();
    let mut net = build_network::<T>(mode, &shapes, InitScheme::Xavier, rng.random())?;
    let mut draw = |n: usize, r: f64| -> Vec<T> {
        (0..n)
            .map(|_| {
                let c: Vec<f64> = (0..T::WIDTH).map(|_| rng.random_range(-r..r)).collect();
                T::from_components(&c)
            })
            .collect()
    };
    let biases: Vec<Vec<T>> = net.layers().iter().map(|l| draw(l.n_out, 0.5)).collect();
    for (l, b) in net.layers_mut().iter_mut().zip(biases) {
        l.biases = b;
    }
    let x = draw(widths[0], 1.0);
    let t = draw(widths[depth], 1.0);
    Ok((net, x, t))
}

fn worst<T: Element>(mode: OrderingMode, activation: Activation, instances: usize, seed: u64) -> Result<f64, NetError> {
    let mut rng = stream_rng(seed, 0x6772_6164);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let (net, x, t) = random_instance::<T>(mode, activation, &mut rng)?;
        let analytic = net.backward(&net.forward(&x)?, &t)?.flat();
        let numeric = numeric_descent(&net, &x, &t)?;
        for (a, n) in analytic.iter().zip(&numeric) {
            worst = worst.max((a - n).abs() / a.abs().max(n.abs()).max(REL_FLOOR));
        }
    }
    Ok(worst)
}

/// Largest relative error over `instances` random networks with depth up
/// to 4 and widths up to 8.
pub fn max_relative_error(
    mode: OrderingMode,
    activation: Activation,
    instances: usize,
    seed: u64,
) -> Result<f64, NetError> {
    match mode {
        OrderingMode::Real => worst::<f64>(mode, activation, instances, seed),
        _ => worst::<Quaternion>(mode, activation, instances, seed),
    }
}
