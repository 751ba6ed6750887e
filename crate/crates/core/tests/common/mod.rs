//! Test oracles kept apart from the library's backprop path.
#![allow(dead_code)]

use rand::RngExt;
use rqnn::net::{loss, Activation, Element, GradientSet, Layer, LayerGrad, Network, OrderingMode};
use rqnn::quat::Quaternion;
use rqnn::rng::{stream_rng, StreamRng};

pub const FD_STEP: f64 = 1e-6;

/// `-dE/dparam` by central differences, in `params_flat` order.
pub fn finite_difference<T: Element>(net: &Network<T>, x: &[T], t: &[T]) -> Vec<f64> {
    let base = net.params_flat();
    let mut probe = net.clone();
    let mut eval = |p: &[f64]| {
        probe.set_params_flat(p).unwrap();
        loss(&probe.predict(x).unwrap(), t).unwrap()
    };
    let mut out = Vec::with_capacity(base.len());
    let mut p = base.clone();
    for i in 0..base.len() {
        p[i] = base[i] + FD_STEP;
        let up = eval(&p);
        p[i] = base[i] - FD_STEP;
        let down = eval(&p);
        p[i] = base[i];
        out.push(-(up - down) / (2.0 * FD_STEP));
    }
    out
}

/// `|a - b| / max(|a|, |b|, floor)`.
pub fn relative_error(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

pub fn random_quat(rng: &mut StreamRng, scale: f64) -> Quaternion {
    Quaternion::new(
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
    )
}

pub fn random_element<T: Element>(rng: &mut StreamRng, scale: f64) -> T {
    let c: Vec<f64> = (0..4).map(|_| rng.random_range(-scale..scale)).collect();
    T::from_components(&c)
}

/// Random network with `depth` layers of width at most `max_width`. Weight
/// components are uniform with variance `1 / fan_in` (fan in real
/// components), so signals stay O(1) through depth.
pub fn random_network<T: Element>(
    mode: OrderingMode,
    activation: Activation,
    depth: usize,
    max_width: usize,
    rng: &mut StreamRng,
) -> Network<T> {
    let widths: Vec<usize> = (0..=depth).map(|_| rng.random_range(1..=max_width)).collect();
    let layers = widths
        .windows(2)
        .map(|w| Layer {
            n_in: w[0],
            n_out: w[1],
            weights: (0..w[0] * w[1])
                .map(|_| random_element(rng, (3.0 / (w[0] * T::WIDTH) as f64).sqrt()))
                .collect(),
            biases: (0..w[1]).map(|_| random_element(rng, 0.5)).collect(),
            activation,
        })
        .collect();
    Network::new(mode, layers).unwrap()
}

pub fn random_pattern<T: Element>(net: &Network<T>, rng: &mut StreamRng) -> (Vec<T>, Vec<T>) {
    let x = (0..net.input_width()).map(|_| random_element(rng, 1.0)).collect();
    let t = (0..net.output_width()).map(|_| random_element(rng, 1.0)).collect();
    (x, t)
}

pub fn rng(seed: u64) -> StreamRng {
    stream_rng(seed, 0xdead_beef)
}

fn sig_prime(y: Quaternion) -> Quaternion {
    y.map(|c| (1.0 - c) * c)
}

/// Three-layer network pieces in the textbook notation: input `I_l`,
/// hidden `H_m`, output `O_n`, weights `w_ml`, `v_nm`.
struct ThreeLayer {
    i: Vec<Quaternion>,
    h: Vec<Quaternion>,
    o: Vec<Quaternion>,
    v: Vec<Vec<Quaternion>>,
}

fn three_layer(net: &Network<Quaternion>, x: &[Quaternion]) -> ThreeLayer {
    assert_eq!(net.layers().len(), 2, "closed forms cover one hidden layer");
    let trace = net.forward(x).unwrap();
    let out_layer = &net.layers()[1];
    let v = (0..out_layer.n_out)
        .map(|n| (0..out_layer.n_in).map(|m| out_layer.weight(n, m)).collect())
        .collect();
    ThreeLayer {
        i: x.to_vec(),
        h: trace.outputs[0].clone(),
        o: trace.outputs[1].clone(),
        v,
    }
}

fn assemble(
    dw: Vec<Vec<Quaternion>>,
    dtheta: Vec<Quaternion>,
    dv: Vec<Vec<Quaternion>>,
    dgamma: Vec<Quaternion>,
) -> GradientSet<Quaternion> {
    GradientSet {
        layers: vec![
            LayerGrad { weights: dw.concat(), biases: dtheta },
            LayerGrad { weights: dv.concat(), biases: dgamma },
        ],
    }
}

/// Published closed-form corrections for the weight-times-input network
/// (sigmoid, learning constant set to 1), transcribed term by term:
/// dv = conj(H) dgamma, dgamma = (1-O)O delta, dw = I conj(dtheta),
/// dtheta = (1-H)H (.) sum_n conj(dgamma_n) v_nm.
pub fn literal_rqnn(net: &Network<Quaternion>, x: &[Quaternion], t: &[Quaternion]) -> GradientSet<Quaternion> {
    let s = three_layer(net, x);
    let dgamma: Vec<Quaternion> = s.o.iter().zip(t).map(|(o, t)| sig_prime(*o).hadamard(*t - *o)).collect();
    let dv = dgamma
        .iter()
        .map(|g| s.h.iter().map(|h| h.conjugate() * *g).collect())
        .collect();
    let dtheta: Vec<Quaternion> = (0..s.h.len())
        .map(|m| {
            let sum: Quaternion = (0..dgamma.len()).map(|n| dgamma[n].conjugate() * s.v[n][m]).sum();
            sig_prime(s.h[m]).hadamard(sum)
        })
        .collect();
    let dw = dtheta
        .iter()
        .map(|th| s.i.iter().map(|i| *i * th.conjugate()).collect())
        .collect();
    assemble(dw, dtheta, dv, dgamma)
}

/// Published closed-form corrections for the input-times-weight network:
/// dv = conj(H) dgamma, dgamma = delta (1-O)O, dw = conj(I) dtheta,
/// dtheta = (1-H)H (.) sum_n dgamma_n conj(v_nm).
pub fn literal_qnn(net: &Network<Quaternion>, x: &[Quaternion], t: &[Quaternion]) -> GradientSet<Quaternion> {
    let s = three_layer(net, x);
    let dgamma: Vec<Quaternion> = s.o.iter().zip(t).map(|(o, t)| (*t - *o).hadamard(sig_prime(*o))).collect();
    let dv = dgamma
        .iter()
        .map(|g| s.h.iter().map(|h| h.conjugate() * *g).collect())
        .collect();
    let dtheta: Vec<Quaternion> = (0..s.h.len())
        .map(|m| {
            let sum: Quaternion = (0..dgamma.len()).map(|n| dgamma[n] * s.v[n][m].conjugate()).sum();
            sig_prime(s.h[m]).hadamard(sum)
        })
        .collect();
    let dw = dtheta
        .iter()
        .map(|th| s.i.iter().map(|i| i.conjugate() * *th).collect())
        .collect();
    assemble(dw, dtheta, dv, dgamma)
}

/// Weight-times-input corrections derived from the adjoints of left
/// multiplication: dv = dgamma conj(H), dw = dtheta conj(I),
/// dtheta = (1-H)H (.) sum_n conj(v_nm) dgamma_n.
pub fn derived_rqnn(net: &Network<Quaternion>, x: &[Quaternion], t: &[Quaternion]) -> GradientSet<Quaternion> {
    let s = three_layer(net, x);
    let dgamma: Vec<Quaternion> = s.o.iter().zip(t).map(|(o, t)| sig_prime(*o).hadamard(*t - *o)).collect();
    let dv = dgamma
        .iter()
        .map(|g| s.h.iter().map(|h| *g * h.conjugate()).collect())
        .collect();
    let dtheta: Vec<Quaternion> = (0..s.h.len())
        .map(|m| {
            let sum: Quaternion = (0..dgamma.len()).map(|n| s.v[n][m].conjugate() * dgamma[n]).sum();
            sig_prime(s.h[m]).hadamard(sum)
        })
        .collect();
    let dw = dtheta
        .iter()
        .map(|th| s.i.iter().map(|i| *th * i.conjugate()).collect())
        .collect();
    assemble(dw, dtheta, dv, dgamma)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
