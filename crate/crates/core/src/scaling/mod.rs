//! Boundary scaling chain `sigma = Phi . Lambda . Psi . frame`.
//!
//! `frame` is a rigid motion sending a boundary point `q` to the origin with
//! outward normal `-e_1`; `Psi` is a quadratic shear putting the defining
//! function in the form `-Re w_1 + |w'|^2 + (Hermitian terms) + o(|w|^2)`
//! (up to a positive factor); `Lambda` is the anisotropic dilation
//! normalizing the anchor point to `(1, 0, ..., 0)`; and `Phi` is the Cayley
//! map of the Siegel domain onto the unit ball.

mod sandwich;
mod shear;
mod squeeze;
mod transport;

pub use sandwich::{minimal_feasible_r, sample_count, sandwich_check, SandwichReport, DEFAULT_WINDOW_RADIUS};
pub use shear::{QuadraticShear, KAPPA};
pub use squeeze::{squeeze_membership, QuadricSqueezeSets, SqueezeSet};
pub use transport::TransportedKernel;

use crate::error::{Error, Result};
use crate::geometry::domain::COLLAR_WIDTH;
use crate::geometry::rigid::householder_to_axis;
use crate::geometry::{boundary_distance, ComplexPoint, Domain, RigidMotion};
use crate::linalg::{determinant, solve};
use crate::C64;
use nalgebra::DMatrix;
use serde::Serialize;

const BOUNDARY_TOL: f64 = 1e-10;

/// Rigid motion with `frame(q) = 0` and outward normal sent to `-e_1`.
pub fn normalize_at_boundary(domain: &Domain, q: &ComplexPoint) -> Result<RigidMotion> {
    q.check_dim(domain.dim())?;
    let rho = domain.rho(q);
    if rho.abs() >= BOUNDARY_TOL {
        return Err(Error::OutsideDomain { rho });
    }
    let jet = domain.defining_jet(q)?;
    let n_out = jet.gradient().normalized().ok_or(Error::DegenerateGradient)?;
    let u = householder_to_axis(&n_out, C64::new(-1.0, 0.0))?;
    let b = ComplexPoint((&u * nalgebra::DVector::from_column_slice(q.coords())).iter().map(|c| -c).collect());
    RigidMotion::new(u, b)
}

/// Shear for the domain seen through `frame`.
pub fn quadratic_shear(domain: &Domain, frame: &RigidMotion) -> Result<QuadraticShear> {
    let q = frame.apply_inverse(&ComplexPoint::zeros(domain.dim()));
    let jet = domain.defining_jet(&q)?.pullback_linear(&frame.unitary.adjoint());
    QuadraticShear::from_jet(&jet)
}

/// `Phi(u) = ((u_1 - 1)/(u_1 + 1), 2u'/(u_1 + 1))`
pub fn cayley(u: &ComplexPoint) -> ComplexPoint {
    let d = u[0] + 1.0;
    let mut y = vec![(u[0] - 1.0) / d];
    y.extend(u.coords()[1..].iter().map(|c| c * 2.0 / d));
    ComplexPoint(y)
}

pub fn cayley_inverse(y: &ComplexPoint) -> Result<ComplexPoint> {
    let d = C64::new(1.0, 0.0) - y[0];
    if d.norm() < 1e-15 {
        return Err(Error::NonConvergence("point at the Cayley pole".into()));
    }
    let mut u = vec![(y[0] + 1.0) / d];
    u.extend(y.coords()[1..].iter().map(|c| c / d));
    Ok(ComplexPoint(u))
}

fn cayley_jacobian(u: &ComplexPoint) -> DMatrix<C64> {
    let n = u.dim();
    let d = u[0] + 1.0;
    let mut j = DMatrix::zeros(n, n);
    j[(0, 0)] = C64::new(2.0, 0.0) / (d * d);
    for i in 1..n {
        j[(i, 0)] = -u[i] * 2.0 / (d * d);
        j[(i, i)] = C64::new(2.0, 0.0) / d;
    }
    j
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingChain {
    /// Point sent to the origin.
    pub anchor: ComplexPoint,
    /// Nearest boundary point of the anchor.
    pub foot: ComplexPoint,
    pub dist: f64,
    pub frame: RigidMotion,
    pub shear: QuadraticShear,
    pub lambda: f64,
    /// Unit phase of the first coordinate of `Psi(frame(anchor))`.
    #[serde(with = "phase_serde")]
    pub phase: C64,
}

mod phase_serde {
    use crate::C64;
    use serde::Serializer;
    pub fn serialize<S: Serializer>(c: &C64, s: S) -> Result<S::Ok, S::Error> {
        serde::Serialize::serialize(&crate::serde_complex::to_pair(*c), s)
    }
}

/// Intermediate images of a point under the chain.
#[derive(Debug, Clone)]
pub struct ChainStages {
    pub frame: ComplexPoint,
    pub shear: ComplexPoint,
    pub dilation: ComplexPoint,
    pub cayley: ComplexPoint,
}

/// Chain for an interior point in the boundary collar. Fails when the
/// nearest boundary point is not unique.
pub fn build_chain(domain: &Domain, p: &ComplexPoint) -> Result<ScalingChain> {
    let bd = boundary_distance(domain, p)?;
    if !bd.unique {
        return Err(Error::AmbiguousBoundaryPoint(format!("nearest boundary point of {:?} is not unique", p.coords())));
    }
    if bd.distance > COLLAR_WIDTH * (1.0 + 1e-9) {
        return Err(Error::InvalidPlan(format!(
            "point at distance {} lies outside the boundary collar of width {COLLAR_WIDTH}",
            bd.distance
        )));
    }
    build_chain_at(domain, p, &bd.foot)
}

/// Chain anchored at `p` with an explicitly chosen boundary point `q`.
pub fn build_chain_at(domain: &Domain, p: &ComplexPoint, q: &ComplexPoint) -> Result<ScalingChain> {
    let frame = normalize_at_boundary(domain, q)?;
    let shear = quadratic_shear(domain, &frame)?;
    let w = shear.apply(&frame.apply(p));
    let lambda = w.norm();
    if !(lambda > 0.0) || w[0].norm() == 0.0 {
        return Err(Error::DegenerateGradient);
    }
    let phase = w[0] / w[0].norm();
    let chain = ScalingChain { anchor: p.clone(), foot: q.clone(), dist: p.distance(q), frame, shear, lambda, phase };
    let y = chain.apply(p);
    if y.norm() > 1e-10 {
        return Err(Error::NonConvergence(format!("chain sends its anchor to norm {:.3e}", y.norm())));
    }
    Ok(chain)
}

impl ScalingChain {
    pub fn dim(&self) -> usize {
        self.anchor.dim()
    }

    fn dilate(&self, w: &ComplexPoint) -> ComplexPoint {
        let s = self.lambda.sqrt();
        let mut u = vec![w[0] * self.phase.conj() / self.lambda];
        u.extend(w.coords()[1..].iter().map(|c| c / s));
        ComplexPoint(u)
    }

    fn undilate(&self, u: &ComplexPoint) -> ComplexPoint {
        let s = self.lambda.sqrt();
        let mut w = vec![u[0] * self.phase * self.lambda];
        w.extend(u.coords()[1..].iter().map(|c| c * s));
        ComplexPoint(w)
    }

    pub fn stages(&self, z: &ComplexPoint) -> ChainStages {
        let frame = self.frame.apply(z);
        let shear = self.shear.apply(&frame);
        let dilation = self.dilate(&shear);
        let cayley = cayley(&dilation);
        ChainStages { frame, shear, dilation, cayley }
    }

    pub fn apply(&self, z: &ComplexPoint) -> ComplexPoint {
        self.stages(z).cayley
    }

    /// `Psi . frame`, the part of the chain independent of the dilation.
    pub fn normal_form(&self, z: &ComplexPoint) -> ComplexPoint {
        self.shear.apply(&self.frame.apply(z))
    }

    pub fn jacobian(&self, z: &ComplexPoint) -> DMatrix<C64> {
        let st = self.stages(z);
        let n = self.dim();
        let s = self.lambda.sqrt();
        let dil = DMatrix::from_fn(n, n, |i, j| match (i, j) {
            (0, 0) => self.phase.conj() / self.lambda,
            (i, j) if i == j => C64::new(1.0 / s, 0.0),
            _ => C64::new(0.0, 0.0),
        });
        cayley_jacobian(&st.dilation) * dil * self.shear.jacobian(&st.frame) * &self.frame.unitary
    }

    pub fn jacobian_determinant(&self, z: &ComplexPoint) -> C64 {
        determinant(&self.jacobian(z))
    }

    /// Preimage of `y`: explicit inverses of the Cayley map and dilation,
    /// damped Newton for the shear, then Newton polishing on the full chain.
    pub fn inverse(&self, y: &ComplexPoint) -> Result<ComplexPoint> {
        y.check_dim(self.dim())?;
        let u = cayley_inverse(y)?;
        let x = self.shear.inverse(&self.undilate(&u))?;
        let mut z = self.frame.apply_inverse(&x);
        let tol = 1e-10 * (1.0 + y.norm());
        let mut r = &self.apply(&z) - y;
        for _ in 0..5 {
            if r.norm() <= 1e-3 * tol {
                break;
            }
            let Some(dz) = solve(&self.jacobian(&z), r.coords()) else { break };
            let mut t = 1.0;
            loop {
                let trial = &z - &ComplexPoint(dz.iter().map(|c| c * t).collect());
                let rt = &self.apply(&trial) - y;
                if rt.norm() < r.norm() || t < 1e-4 {
                    if rt.norm() < r.norm() {
                        z = trial;
                        r = rt;
                    }
                    break;
                }
                t *= 0.5;
            }
        }
        let residual = r.norm();
        if residual.is_finite() && residual <= tol {
            Ok(z)
        } else {
            Err(Error::NonConvergence(format!("chain inversion residual {residual:.3e}")))
        }
    }
}

#[cfg(test)]
mod tests;
