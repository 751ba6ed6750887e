//! Quaternion arithmetic and the rotation helpers used by the analysis code.
//!
//! Components are scalar-first: `a + b i + c j + d k`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use thiserror::Error;

/// Vectors (or quaternions) shorter than this have no usable direction.
pub const DEGENERATE_NORM: f64 = 1e-12;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum QuatError {
    #[error("degenerate vector: norm {0:e} is below {DEGENERATE_NORM:e}")]
    DegenerateVector(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[repr(C)]
pub struct Quaternion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    /// Real quaternion `x + 0i + 0j + 0k`.
    #[inline]
    pub const fn real(x: f64) -> Self {
        Self::new(x, 0.0, 0.0, 0.0)
    }

    /// Pure quaternion carrying a 3D point in its imaginary parts.
    #[inline]
    pub const fn pure(v: Vec3) -> Self {
        Self::new(0.0, v.x, v.y, v.z)
    }

    #[inline]
    pub const fn from_array(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    #[inline]
    pub const fn to_array(self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Imaginary part as a 3D vector; the scalar part is dropped.
    #[inline]
    pub const fn vector(self) -> Vec3 {
        Vec3::new(self.b, self.c, self.d)
    }

    #[inline]
    pub fn conjugate(self) -> Self {
        Self::new(self.a, -self.b, -self.c, -self.d)
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn normalized(self) -> Result<Self, QuatError> {
        let n = self.norm();
        if n < DEGENERATE_NORM {
            return Err(QuatError::DegenerateVector(n));
        }
        Ok(self * (1.0 / n))
    }

    /// Componentwise (Hadamard) product, used by split-type activations.
    #[inline]
    pub fn hadamard(self, o: Self) -> Self {
        Self::new(self.a * o.a, self.b * o.b, self.c * o.c, self.d * o.d)
    }

    #[inline]
    pub fn map(self, mut f: impl FnMut(f64) -> f64) -> Self {
        Self::new(f(self.a), f(self.b), f(self.c), f(self.d))
    }

    pub fn is_finite(self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }

    /// Row-major 3x3 rotation matrix of the normalized quaternion.
    pub fn to_rotation_matrix(self) -> Result<[[f64; 3]; 3], QuatError> {
        let Quaternion { a: w, b: x, c: y, d: z } = self.normalized()?;
        Ok([
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - w * z),
                2.0 * (x * z + w * y),
            ],
            [
                2.0 * (x * y + w * z),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - w * x),
            ],
            [
                2.0 * (x * z - w * y),
                2.0 * (y * z + w * x),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ])
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:+}i {:+}j {:+}k", self.a, self.b, self.c, self.d)
    }
}

/// Hamilton product `p q`.
#[inline]
pub fn hamilton_product(p: Quaternion, q: Quaternion) -> Quaternion {
    Quaternion::new(
        p.a * q.a - p.b * q.b - p.c * q.c - p.d * q.d,
        p.a * q.b + p.b * q.a + p.c * q.d - p.d * q.c,
        p.a * q.c - p.b * q.d + p.c * q.a + p.d * q.b,
        p.a * q.d + p.b * q.c - p.c * q.b + p.d * q.a,
    )
}

#[inline]
pub fn conjugate(q: Quaternion) -> Quaternion {
    q.conjugate()
}

#[inline]
pub fn norm(q: Quaternion) -> f64 {
    q.norm()
}

impl Mul for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn mul(self, rhs: Quaternion) -> Quaternion {
        hamilton_product(self, rhs)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn mul(self, s: f64) -> Quaternion {
        Quaternion::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl AddAssign for Quaternion {
    #[inline]
    fn add_assign(&mut self, o: Quaternion) {
        *self = *self + o;
    }
}

impl SubAssign for Quaternion {
    #[inline]
    fn sub_assign(&mut self, o: Quaternion) {
        *self = *self - o;
    }
}

impl Sum for Quaternion {
    fn sum<I: Iterator<Item = Quaternion>>(iter: I) -> Quaternion {
        iter.fold(Quaternion::ZERO, Add::add)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    #[inline]
    pub fn scale(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn normalized(self) -> Result<Vec3, QuatError> {
        let n = self.norm();
        if n < DEGENERATE_NORM {
            return Err(QuatError::DegenerateVector(n));
        }
        Ok(self.scale(1.0 / n))
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

/// Roll, pitch and yaw in radians (rotations about x, y and z).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EulerAngles {
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
}

impl EulerAngles {
    pub fn to_degrees(self) -> [f64; 3] {
        [self.roll.to_degrees(), self.pitch.to_degrees(), self.yaw.to_degrees()]
    }

    /// `R_z(yaw) R_y(pitch) R_x(roll)`, row-major.
    pub fn to_rotation_matrix(self) -> [[f64; 3]; 3] {
        let (sr, cr) = self.roll.sin_cos();
        let (sp, cp) = self.pitch.sin_cos();
        let (sy, cy) = self.yaw.sin_cos();
        [
            [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
            [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
            [-sp, cp * sr, cp * cr],
        ]
    }
}

/// Angle in `[0, pi]` between two nonzero vectors.
pub fn angle_between(v1: Vec3, v2: Vec3) -> Result<f64, QuatError> {
    let (n1, n2) = (v1.norm(), v2.norm());
    for n in [n1, n2] {
        if n < DEGENERATE_NORM {
            return Err(QuatError::DegenerateVector(n));
        }
    }
    let cos = (v1.dot(v2) / (n1 * n2)).clamp(-1.0, 1.0);
    Ok(cos.acos())
}

/// Unit quaternion of the minimal rotation taking the direction of `v1`
/// onto the direction of `v2`.
///
/// Antiparallel inputs get a half turn about the basis axis least aligned
/// with `v1`, orthogonalized against it.
pub fn rotation_between(v1: Vec3, v2: Vec3) -> Result<Quaternion, QuatError> {
    let angle = angle_between(v1, v2)?;
    let u = v1.normalized()?;
    let w = v2.normalized()?;
    let cross = u.cross(w);
    let axis = if cross.norm() >= DEGENERATE_NORM {
        cross.normalized()?
    } else if u.dot(w) > 0.0 {
        return Ok(Quaternion::ONE);
    } else {
        orthogonal_axis(u)
    };
    let (s, c) = (angle * 0.5).sin_cos();
    Ok(Quaternion::new(c, s * axis.x, s * axis.y, s * axis.z))
}

fn orthogonal_axis(u: Vec3) -> Vec3 {
    let mut best = Vec3::X;
    for e in [Vec3::Y, Vec3::Z] {
        if e.dot(u).abs() < best.dot(u).abs() {
            best = e;
        }
    }
    let v = best - u.scale(best.dot(u));
    // `best` is at most ~0.577 aligned with a unit `u`, so this never degenerates.
    v.scale(1.0 / v.norm())
}

/// Roll, pitch and yaw of a (normalized) quaternion. Pitch saturates at
/// `+-pi/2` when the arcsine argument leaves `[-1, 1]`.
pub fn to_euler(q: Quaternion) -> Result<EulerAngles, QuatError> {
    let Quaternion { a: w, b: x, c: y, d: z } = q.normalized()?;
    let roll = (2.0 * (w * x + y * z)).atan2(1.0 - 2.0 * (x * x + y * y));
    let s = 2.0 * (w * y - z * x);
    let pitch = if s.abs() <= 1.0 {
        s.asin()
    } else {
        FRAC_PI_2 * s.signum()
    };
    let yaw = (2.0 * (w * z + x * y)).atan2(1.0 - 2.0 * (y * y + z * z));
    Ok(EulerAngles { roll, pitch, yaw })
}

/// Imaginary part of `q v q*` with `q` normalized first.
pub fn rotate_vector(q: Quaternion, v: Vec3) -> Result<Vec3, QuatError> {
    let q = q.normalized()?;
    Ok((q * Quaternion::pure(v) * q.conjugate()).vector())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn vclose(a: Vec3, b: Vec3, tol: f64) -> bool {
        close(a.x, b.x, tol) && close(a.y, b.y, tol) && close(a.z, b.z, tol)
    }

    #[test]
    fn identity_and_unit_products() {
        let q = Quaternion::new(0.3, -1.2, 2.5, 4.0);
        assert_eq!(Quaternion::ONE * q, q);
        assert_eq!(q * Quaternion::ONE, q);
        assert_eq!(Quaternion::I * Quaternion::J, Quaternion::K);
        assert_eq!(Quaternion::J * Quaternion::I, -Quaternion::K);
        assert_eq!(Quaternion::K * Quaternion::I, Quaternion::J);
        assert_eq!(Quaternion::J * Quaternion::K, Quaternion::I);
        for u in [Quaternion::I, Quaternion::J, Quaternion::K] {
            assert_eq!(u * u, -Quaternion::ONE);
        }
        assert_eq!(Quaternion::I * Quaternion::J * Quaternion::K, -Quaternion::ONE);
    }

    #[test]
    fn hand_expanded_product() {
        // (1 + i)(1 + j) = 1 + j + i + ij = 1 + i + j + k
        let p = Quaternion::new(1.0, 1.0, 0.0, 0.0);
        let q = Quaternion::new(1.0, 0.0, 1.0, 0.0);
        assert_eq!(p * q, Quaternion::new(1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn conjugate_and_norm_examples() {
        assert_eq!(conjugate(Quaternion::ONE), Quaternion::ONE);
        assert_eq!(
            conjugate(Quaternion::new(1.0, 2.0, 3.0, 4.0)),
            Quaternion::new(1.0, -2.0, -3.0, -4.0)
        );
        assert_eq!(norm(Quaternion::ZERO), 0.0);
        assert_eq!(norm(Quaternion::new(1.0, 1.0, 1.0, 1.0)), 2.0);
        let q = Quaternion::new(1.0, 2.0, 3.0, 4.0);
        let qq = q * q.conjugate();
        assert!(close(qq.a, 30.0, 1e-12));
        assert_eq!([qq.b, qq.c, qq.d], [0.0, 0.0, 0.0]);
    }

    #[test]
    fn angles() {
        assert!(close(angle_between(Vec3::X, Vec3::Y).unwrap(), FRAC_PI_2, 1e-15));
        assert_eq!(angle_between(Vec3::X, Vec3::new(2.0, 0.0, 0.0)).unwrap(), 0.0);
        let a = angle_between(Vec3::new(1.0, 1.0, 0.0), Vec3::X).unwrap();
        assert!(close(a, FRAC_PI_4, 1e-15));
        assert!(matches!(
            angle_between(Vec3::default(), Vec3::X),
            Err(QuatError::DegenerateVector(_))
        ));
    }

    #[test]
    fn rotation_between_examples() {
        let v = Vec3::new(0.2, -3.0, 1.0);
        assert_eq!(rotation_between(v, v.scale(4.0)).unwrap(), Quaternion::ONE);

        let q = rotation_between(Vec3::X, Vec3::Y).unwrap();
        let want = Quaternion::new(FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2);
        assert!((q - want).norm() < 1e-15);
        assert!(vclose(rotate_vector(q, Vec3::X).unwrap(), Vec3::Y, 1e-15));

        let q = rotation_between(Vec3::X, Vec3::new(-1.0, 0.0, 0.0)).unwrap();
        assert!(close(q.norm(), 1.0, 1e-15));
        assert!(q.a.abs() < 1e-16);
        assert!(vclose(
            rotate_vector(q, Vec3::X).unwrap(),
            Vec3::new(-1.0, 0.0, 0.0),
            1e-15
        ));
        assert!(rotation_between(Vec3::X, Vec3::default()).is_err());
    }

    #[test]
    fn euler_examples() {
        assert_eq!(to_euler(Quaternion::ONE).unwrap(), EulerAngles::default());
        let e = to_euler(Quaternion::new(FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2)).unwrap();
        assert!(close(e.roll, 0.0, 1e-15));
        assert!(close(e.pitch, 0.0, 1e-15));
        assert!(close(e.yaw, FRAC_PI_2, 1e-15));
        assert!(to_euler(Quaternion::ZERO).is_err());
    }

    #[test]
    fn euler_gimbal_clamp() {
        // A quarter turn about y puts 2(wy - zx) at exactly 1; rounding in the
        // normalization can push it past 1, which must saturate, not NaN.
        let q = Quaternion::new(1.0, 0.0, 1.0 + 1e-15, 0.0);
        let e = to_euler(q).unwrap();
        assert!(close(e.pitch, FRAC_PI_2, 1e-7));
        assert!(!e.pitch.is_nan());
        let e = to_euler(Quaternion::new(1.0, 0.0, -1.0, 0.0)).unwrap();
        assert!(close(e.pitch, -FRAC_PI_2, 1e-7));
    }

    #[test]
    fn rotate_vector_examples() {
        let v = Vec3::new(0.5, -2.0, 7.0);
        assert_eq!(rotate_vector(Quaternion::ONE, v).unwrap(), v);
        let q = Quaternion::new(FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2);
        assert!(vclose(rotate_vector(q, Vec3::X).unwrap(), Vec3::Y, 1e-15));
        // half turn about z
        let q = Quaternion::new(0.0, 0.0, 0.0, 2.0);
        assert!(vclose(rotate_vector(q, Vec3::X).unwrap(), Vec3::new(-1.0, 0.0, 0.0), 1e-15));
    }
}
