//! Quaternion feedforward networks in both multiplication orders.
//!
//! * [`quat`]: quaternion algebra, angles, rotations and Euler angles.
//! * [`net`]: networks over reals or quaternions with exact backprop,
//!   initializers and optimizers.
//! * [`experiments`]: datasets, trial runners and summaries for the
//!   learning-speed and rotation experiments.
//! * [`cli`]: configuration, result bundles and SVG plots behind the `rqnn`
//!   binary.

pub mod cli;
pub mod experiments;
pub mod net;
pub mod quat;
pub mod rng;

pub use net::{Activation, Network, OrderingMode, QuatNetwork, RealNetwork};
pub use quat::{EulerAngles, Quaternion, Vec3};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
