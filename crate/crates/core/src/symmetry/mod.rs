//! Finite unitary symmetry groups, averaged exhaustions, orbits and
//! automorphisms of the unit ball.

mod automorphism;
mod exhaustion;
mod group;

pub use automorphism::{curvature_invariance_check, BallAutomorphism};
pub use exhaustion::{
    average_exhaustion, circle_average, invariant_sublevel_indicator, orbit, orbit_boundary_distance, CIRCLE_NODES,
};
pub use group::{FiniteUnitaryGroup, GroupSpec, MatrixSpec, MAX_GROUP_ORDER};
