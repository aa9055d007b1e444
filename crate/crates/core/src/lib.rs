//! Cucker-Smale flocking on the rotation group SO(3).
//!
//! The crate is layered bottom-up:
//!
//! * [`so3`]: hat/vee, Rodrigues exponential and logarithm, geodesic distance,
//!   polar projection.
//! * [`charts`]: exponential coordinates around a base rotation (tangent
//!   basis, metric, Christoffel symbols, a transport ODE solver). These serve
//!   as independent oracles for the closed forms.
//! * [`transport`]: closed-form parallel transport in vector, sandwich and
//!   ambient matrix form.
//! * [`flock`]: the particle system, integrators, energy diagnostics and the
//!   asymptotic classifier.

// `!(x < y)` comparisons are written to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charts;
pub mod coeffs;
pub mod error;
pub mod flock;
pub mod so3;
pub mod transport;

pub use error::{Error, Result};
pub use so3::{Mat3, Rotation, SkewMat, Vec3};
