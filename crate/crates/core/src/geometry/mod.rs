//! Domains in `C^n`, boundary distance and interior sampling.

pub mod distance;
pub mod domain;
pub mod point;
pub mod quadrature;
pub mod rigid;
pub mod sampling;

pub use distance::{boundary_distance, BoundaryDistance, DistanceMethod};
pub use domain::{BoundingBox, DefiningJet, Domain, DomainSpec, PerturbationTerm, ReinhardtProfile, Window};
pub use point::{binomial, factorial, ComplexPoint, MultiIndex};
pub use rigid::RigidMotion;
pub use sampling::{sample_interior, ProductRule, Sample, SamplePlan};
