//! Anti-holomorphic dynamics of Schwarz reflection maps.
//!
//! The crate covers the cardioid and deltoid quadrature domains, the
//! circle-and-cardioid family `F_a`, the ideal triangle reflection group with
//! its circle conjugacy to `θ ↦ −2θ`, the Minkowski question-mark function and
//! dynamical rays traced by inverse branches.
//!
//! Every point of the sphere is a [`ComplexPoint`]; the point at infinity is an
//! explicit variant because critical orbits pass through it exactly.

pub mod cardioid;
pub mod cnc;
pub mod deltoid;
mod error;
pub mod plane;
pub mod rays;
pub mod symbolic;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use plane::{chordal_distance, AntiMobius, reflect_in_circle, solve_cubic_monic, solve_quadratic, Circle, ComplexPoint, RootSet};
