//! Numerical laboratory for Bergman kernels of bounded domains in `C^n`.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: domains given by defining functions, boundary distance,
//!   deterministic sampling and quadrature over domain interiors.
//! - [`kernel`]: truncated Bergman kernels built from a monomial basis and a
//!   pivoted Gram factorization, plus closed-form ball/polydisc kernels.
//! - [`curvature`]: Bergman metric, curvature tensor and holomorphic
//!   sectional curvature from exact Taylor jets of `log K`.
//! - [`scaling`]: rigid frame, quadratic shear, anisotropic dilation and
//!   Cayley map composing the boundary scaling chain.
//! - [`symmetry`]: finite unitary groups, averaged exhaustions, orbits and
//!   automorphisms of the unit ball.
//!
//! Data-parallel loops go through [`parallel`], which falls back to plain
//! iterators when the `parallel` feature is disabled. Every reduction is
//! carried out in a fixed block order, so results do not depend on the
//! number of threads.

pub mod curvature;
pub mod error;
pub mod geometry;
pub mod jet;
pub mod kernel;
pub mod linalg;
pub mod parallel;
pub mod scaling;
pub mod serde_complex;
pub mod symmetry;

pub use error::{Error, Result};
pub use geometry::{ComplexPoint, MultiIndex};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
