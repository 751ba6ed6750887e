use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Sub};

use crate::quat::Quaternion;

/// Scalar type a network is built over: `f64` for the real baseline,
/// [`Quaternion`] for both quaternion orderings.
///
/// Conjugation is the identity on reals, so the quaternion backprop rules
/// specialize to ordinary backprop when `Self = f64`.
pub trait Element:
    Copy
    + Default
    + PartialEq
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + AddAssign
    + 'static
{
    /// Number of real components.
    const WIDTH: usize;

    fn conj(self) -> Self;
    fn hadamard(self, other: Self) -> Self;
    fn map(self, f: impl FnMut(f64) -> f64) -> Self;
    fn scale(self, s: f64) -> Self;
    fn norm_squared(self) -> f64;
    fn is_finite(self) -> bool;

    /// Calls `f(component, other_component)` for each component pair, in
    /// `a, b, c, d` order.
    fn zip_apply(&mut self, other: Self, f: &mut impl FnMut(&mut f64, f64));
    fn push_components(self, out: &mut Vec<f64>);
    /// Reads `WIDTH` components from the front of `src`.
    fn from_components(src: &[f64]) -> Self;
}

impl Element for f64 {
    const WIDTH: usize = 1;

    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn hadamard(self, other: Self) -> Self {
        self * other
    }
    #[inline]
    fn map(self, mut f: impl FnMut(f64) -> f64) -> Self {
        f(self)
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
    #[inline]
    fn norm_squared(self) -> f64 {
        self * self
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    #[inline]
    fn zip_apply(&mut self, other: Self, f: &mut impl FnMut(&mut f64, f64)) {
        f(self, other)
    }
    fn push_components(self, out: &mut Vec<f64>) {
        out.push(self);
    }
    fn from_components(src: &[f64]) -> Self {
        src[0]
    }
}

impl Element for Quaternion {
    const WIDTH: usize = 4;

    #[inline]
    fn conj(self) -> Self {
        self.conjugate()
    }
    #[inline]
    fn hadamard(self, other: Self) -> Self {
        Quaternion::hadamard(self, other)
    }
    #[inline]
    fn map(self, f: impl FnMut(f64) -> f64) -> Self {
        Quaternion::map(self, f)
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
    #[inline]
    fn norm_squared(self) -> f64 {
        Quaternion::norm_squared(self)
    }
    fn is_finite(self) -> bool {
        Quaternion::is_finite(self)
    }
    #[inline]
    fn zip_apply(&mut self, o: Self, f: &mut impl FnMut(&mut f64, f64)) {
        f(&mut self.a, o.a);
        f(&mut self.b, o.b);
        f(&mut self.c, o.c);
        f(&mut self.d, o.d);
    }
    fn push_components(self, out: &mut Vec<f64>) {
        out.extend_from_slice(&self.to_array());
    }
    fn from_components(src: &[f64]) -> Self {
        Quaternion::new(src[0], src[1], src[2], src[3])
    }
}

/// Quaternions to `4n` consecutive reals, `(a, b, c, d)` per quaternion.
pub fn flatten(qs: &[Quaternion]) -> Vec<f64> {
    qs.iter().flat_map(|q| q.to_array()).collect()
}

/// Inverse of [`flatten`]; a trailing partial group is zero-padded.
pub fn group(xs: &[f64]) -> Vec<Quaternion> {
    xs.chunks(4)
        .map(|c| {
            let mut buf = [0.0; 4];
            buf[..c.len()].copy_from_slice(c);
            Quaternion::from_array(buf)
        })
        .collect()
}
