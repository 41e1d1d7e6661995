use crate::error::{Error, Result};
use crate::geometry::ComplexPoint;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SqueezeSet {
    /// `Re z_1 > (1 - margin)|z|^2`, the larger set.
    E,
    /// `Re z_1 > (1 + margin)|z|^2`
    S,
}

/// The pair of quadric domains pinching a normalized boundary from both
/// sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadricSqueezeSets {
    pub margin: f64,
}

impl QuadricSqueezeSets {
    pub fn new(margin: f64) -> Result<Self> {
        if !(margin > 0.0 && margin < 1.0) {
            return Err(Error::InvalidPlan(format!("squeeze margin {margin} must lie in (0, 1)")));
        }
        Ok(Self { margin })
    }

    pub fn contains(&self, which: SqueezeSet, z: &ComplexPoint) -> bool {
        let f = match which {
            SqueezeSet::E => 1.0 - self.margin,
            SqueezeSet::S => 1.0 + self.margin,
        };
        z[0].re > f * z.norm_sqr()
    }
}

pub fn squeeze_membership(sets: &QuadricSqueezeSets, which: SqueezeSet, z: &ComplexPoint) -> bool {
    sets.contains(which, z)
}
