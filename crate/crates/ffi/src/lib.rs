//! C ABI over the `rqnn` library.
//!
//! Networks are opaque handles created by [`rqnn_network_new`] and released
//! with [`rqnn_network_free`]. Every fallible call returns an
//! [`RqnnStatus`]; on failure [`rqnn_last_error`] describes what went wrong
//! on the calling thread. Quaternion-valued buffers hold four doubles per
//! element in `(a, b, c, d)` order; real networks use one double per unit.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rqnn::net::init::{build_network, InitScheme, LayerShape};
use rqnn::net::optim::sgd_step;
use rqnn::net::{loss, Activation, Element, NetError, Network, OrderingMode};
use rqnn::quat::{self, Quaternion, Vec3};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RqnnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ShapeMismatch = 3,
    /// A vector or quaternion was too close to zero to define a direction.
    Degenerate = 4,
    /// A Rust panic was caught at the boundary.
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RqnnMode {
    /// Neurons compute the sum of weight times input plus bias.
    Rqnn = 0,
    /// Neurons compute the sum of input times weight plus bias.
    Qnn = 1,
    Real = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RqnnActivation {
    Sigmoid = 0,
    Identity = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RqnnInit {
    /// Uniform on `[-L, L]` with `L = sqrt(6 / (fan_in + fan_out))`, zero biases.
    Xavier = 0,
    /// Every component uniform on `[lo, hi)`.
    Uniform = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RqnnQuaternion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Radians.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RqnnEuler {
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
}

enum Inner {
    Quat(Network<Quaternion>),
    Real(Network<f64>),
}

/// Opaque network handle.
pub struct RqnnNetwork {
    inner: Inner,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

type Failure = (RqnnStatus, String);

fn net_failure(e: NetError) -> Failure {
    let status = match e {
        NetError::ShapeMismatch { .. } => RqnnStatus::ShapeMismatch,
        _ => RqnnStatus::InvalidArgument,
    };
    (status, e.to_string())
}

fn quat_failure(e: quat::QuatError) -> Failure {
    (RqnnStatus::Degenerate, e.to_string())
}

fn null(what: &str) -> Failure {
    (RqnnStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RqnnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            RqnnStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            RqnnStatus::Panic
        }
    }
}

/// # Safety
/// `p` must be null or point to `len` readable values.
unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// # Safety
/// `p` must be null or point to `len` writable values.
unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

/// # Safety
/// `net` must be null or a live handle from [`rqnn_network_new`].
unsafe fn handle<'a>(net: *const RqnnNetwork) -> Result<&'a RqnnNetwork, Failure> {
    net.as_ref().ok_or_else(|| null("network"))
}

/// # Safety
/// `net` must be null or a live handle from [`rqnn_network_new`].
unsafe fn handle_mut<'a>(net: *mut RqnnNetwork) -> Result<&'a mut RqnnNetwork, Failure> {
    net.as_mut().ok_or_else(|| null("network"))
}

fn activation(a: RqnnActivation) -> Activation {
    match a {
        RqnnActivation::Sigmoid => Activation::SplitSigmoid,
        RqnnActivation::Identity => Activation::Identity,
    }
}

fn to_elements<T: Element>(values: &[f64]) -> Vec<T> {
    values.chunks(T::WIDTH).map(T::from_components).collect()
}

fn from_elements<T: Element>(xs: &[T]) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len() * T::WIDTH);
    for x in xs {
        x.push_components(&mut out);
    }
    out
}

fn check_len(what: &'static str, expected: usize, got: usize) -> Result<(), Failure> {
    if expected == got {
        Ok(())
    } else {
        Err(net_failure(NetError::ShapeMismatch { what, expected, got }))
    }
}

fn forward_into<T: Element>(net: &Network<T>, input: &[f64], output: &mut [f64]) -> Result<(), Failure> {
    check_len("input values", net.input_width() * T::WIDTH, input.len())?;
    check_len("output values", net.output_width() * T::WIDTH, output.len())?;
    let y = net.predict(&to_elements::<T>(input)).map_err(net_failure)?;
    output.copy_from_slice(&from_elements(&y));
    Ok(())
}

fn train_step<T: Element>(net: &mut Network<T>, input: &[f64], target: &[f64], lr: f64) -> Result<f64, Failure> {
    check_len("input values", net.input_width() * T::WIDTH, input.len())?;
    check_len("target values", net.output_width() * T::WIDTH, target.len())?;
    if !(lr.is_finite() && lr >= 0.0) {
        return Err((RqnnStatus::InvalidArgument, format!("learning rate {lr} must be finite and non-negative")));
    }
    let t = to_elements::<T>(target);
    let trace = net.forward(&to_elements::<T>(input)).map_err(net_failure)?;
    let before = loss(trace.output(), &t).map_err(net_failure)?;
    let g = net.backward(&trace, &t).map_err(net_failure)?;
    sgd_step(net, &g, lr).map_err(net_failure)?;
    Ok(before)
}

/// Builds a network with layer widths `widths[0..n_widths]` (at least two).
/// Hidden layers use `hidden`, the last layer uses `output`. The layer at
/// index `k` draws its initial values from stream `k` of `seed`.
///
/// # Safety
/// `widths` must point to `n_widths` values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rqnn_network_new(
    mode: RqnnMode,
    widths: *const usize,
    n_widths: usize,
    hidden: RqnnActivation,
    output: RqnnActivation,
    init: RqnnInit,
    lo: f64,
    hi: f64,
    seed: u64,
    out: *mut *mut RqnnNetwork,
) -> RqnnStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let widths = slice(widths, n_widths, "widths")?;
        if widths.len() < 2 || widths.contains(&0) {
            return Err((RqnnStatus::InvalidArgument, "need at least two non-zero widths".into()));
        }
        let last = widths.len() - 2;
        let shapes: Vec<LayerShape> = widths
            .windows(2)
            .enumerate()
            .map(|(k, w)| LayerShape {
                n_in: w[0],
                n_out: w[1],
                activation: activation(if k == last { output } else { hidden }),
            })
            .collect();
        let scheme = match init {
            RqnnInit::Xavier => InitScheme::Xavier,
            RqnnInit::Uniform => InitScheme::Uniform { lo, hi },
        };
        let inner = match mode {
            RqnnMode::Real => Inner::Real(build_network(OrderingMode::Real, &shapes, scheme, seed).map_err(net_failure)?),
            RqnnMode::Rqnn => Inner::Quat(build_network(OrderingMode::Rqnn, &shapes, scheme, seed).map_err(net_failure)?),
            RqnnMode::Qnn => Inner::Quat(build_network(OrderingMode::Qnn, &shapes, scheme, seed).map_err(net_failure)?),
        };
        *out = Box::into_raw(Box::new(RqnnNetwork { inner }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `net` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rqnn_network_free(net: *mut RqnnNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Copies the network (same mode and parameters) into `*out`.
///
/// # Safety
/// `net` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rqnn_network_clone(net: *const RqnnNetwork, out: *mut *mut RqnnNetwork) -> RqnnStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = match &handle(net)?.inner {
            Inner::Quat(n) => Inner::Quat(n.clone()),
            Inner::Real(n) => Inner::Real(n.clone()),
        };
        *out = Box::into_raw(Box::new(RqnnNetwork { inner }));
        Ok(())
    })
}

/// Same parameters, other quaternion ordering.
///
/// # Safety
/// `net` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rqnn_network_set_mode(net: *mut RqnnNetwork, mode: RqnnMode) -> RqnnStatus {
    guard(|| {
        let h = handle_mut(net)?;
        let Inner::Quat(n) = &h.inner else {
            return Err((RqnnStatus::InvalidArgument, "real networks have a single ordering".into()));
        };
        let m = match mode {
            RqnnMode::Rqnn => OrderingMode::Rqnn,
            RqnnMode::Qnn => OrderingMode::Qnn,
            RqnnMode::Real => {
                return Err((RqnnStatus::InvalidArgument, "cannot switch a quaternion network to real".into()))
            }
        };
        h.inner = Inner::Quat(n.with_mode(m).map_err(net_failure)?);
        Ok(())
    })
}

/// Number of real parameters, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rqnn_network_param_count(net: *const RqnnNetwork) -> usize {
    match net.as_ref().map(|h| &h.inner) {
        Some(Inner::Quat(n)) => n.param_count(),
        Some(Inner::Real(n)) => n.param_count(),
        None => 0,
    }
}

/// Number of doubles in an input buffer, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rqnn_network_input_len(net: *const RqnnNetwork) -> usize {
    match net.as_ref().map(|h| &h.inner) {
        Some(Inner::Quat(n)) => n.input_width() * 4,
        Some(Inner::Real(n)) => n.input_width(),
        None => 0,
    }
}

/// Number of doubles in an output buffer, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rqnn_network_output_len(net: *const RqnnNetwork) -> usize {
    match net.as_ref().map(|h| &h.inner) {
        Some(Inner::Quat(n)) => n.output_width() * 4,
        Some(Inner::Real(n)) => n.output_width(),
        None => 0,
    }
}

/// # Safety
/// `input` and `output` must hold `n_input` and `n_output` doubles.
#[no_mangle]
pub unsafe extern "C" fn rqnn_network_forward(
    net: *const RqnnNetwork,
    input: *const f64,
    n_input: usize,
    output: *mut f64,
    n_output: usize,
) -> RqnnStatus {
    guard(|| {
        let h = handle(net)?;
        let x = slice(input, n_input, "input")?;
        let y = slice_mut(output, n_output, "output")?;
        match &h.inner {
            Inner::Quat(n) => forward_into(n, x, y),
            Inner::Real(n) => forward_into(n, x, y),
        }
    })
}

/// One steepest-descent update on a single pattern. `loss_before`, when not
/// null, receives the pattern loss before the update.
///
/// # Safety
/// Buffers must hold the stated counts; `loss_before` may be null.
#[no_mangle]
pub unsafe extern "C" fn rqnn_network_train_step(
    net: *mut RqnnNetwork,
    input: *const f64,
    n_input: usize,
    target: *const f64,
    n_target: usize,
    learning_rate: f64,
    loss_before: *mut f64,
) -> RqnnStatus {
    guard(|| {
        let h = handle_mut(net)?;
        let x = slice(input, n_input, "input")?;
        let t = slice(target, n_target, "target")?;
        let l = match &mut h.inner {
            Inner::Quat(n) => train_step(n, x, t, learning_rate)?,
            Inner::Real(n) => train_step(n, x, t, learning_rate)?,
        };
        if !loss_before.is_null() {
            *loss_before = l;
        }
        Ok(())
    })
}

/// Copies all parameters (weights then biases, layer by layer).
///
/// # Safety
/// `out` must hold `n` doubles, `n == rqnn_network_param_count(net)`.
#[no_mangle]
pub unsafe extern "C" fn rqnn_network_get_params(net: *const RqnnNetwork, out: *mut f64, n: usize) -> RqnnStatus {
    guard(|| {
        let p = match &handle(net)?.inner {
            Inner::Quat(n) => n.params_flat(),
            Inner::Real(n) => n.params_flat(),
        };
        check_len("parameter buffer", p.len(), n)?;
        slice_mut(out, n, "out")?.copy_from_slice(&p);
        Ok(())
    })
}

/// # Safety
/// `values` must hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn rqnn_network_set_params(net: *mut RqnnNetwork, values: *const f64, n: usize) -> RqnnStatus {
    guard(|| {
        let h = handle_mut(net)?;
        let v = slice(values, n, "values")?;
        match &mut h.inner {
            Inner::Quat(net) => net.set_params_flat(v),
            Inner::Real(net) => net.set_params_flat(v),
        }
        .map_err(net_failure)
    })
}

fn q(x: RqnnQuaternion) -> Quaternion {
    Quaternion::new(x.a, x.b, x.c, x.d)
}

fn rq(x: Quaternion) -> RqnnQuaternion {
    RqnnQuaternion {
        a: x.a,
        b: x.b,
        c: x.c,
        d: x.d,
    }
}

#[no_mangle]
pub extern "C" fn rqnn_hamilton_product(p: RqnnQuaternion, r: RqnnQuaternion) -> RqnnQuaternion {
    rq(q(p) * q(r))
}

#[no_mangle]
pub extern "C" fn rqnn_conjugate(p: RqnnQuaternion) -> RqnnQuaternion {
    rq(q(p).conjugate())
}

#[no_mangle]
pub extern "C" fn rqnn_norm(p: RqnnQuaternion) -> f64 {
    q(p).norm()
}

/// Roll, pitch and yaw of the rotation `p` (normalized first).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rqnn_to_euler(p: RqnnQuaternion, out: *mut RqnnEuler) -> RqnnStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let e = quat::to_euler(q(p)).map_err(quat_failure)?;
        *out = RqnnEuler {
            roll: e.roll,
            pitch: e.pitch,
            yaw: e.yaw,
        };
        Ok(())
    })
}

/// Unit quaternion rotating direction `v1` onto `v2` (3 doubles each).
///
/// # Safety
/// `v1`, `v2` must hold 3 doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rqnn_rotation_between(v1: *const f64, v2: *const f64, out: *mut RqnnQuaternion) -> RqnnStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let a = slice(v1, 3, "v1")?;
        let b = slice(v2, 3, "v2")?;
        let r = quat::rotation_between(Vec3::new(a[0], a[1], a[2]), Vec3::new(b[0], b[1], b[2]))
            .map_err(quat_failure)?;
        *out = rq(r);
        Ok(())
    })
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn rqnn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn rqnn_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}
