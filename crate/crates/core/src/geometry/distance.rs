//! Euclidean distance to the boundary.

use crate::error::{Error, Result};
use crate::geometry::domain::{Domain, ShapeKind};
use crate::geometry::ComplexPoint;
use crate::C64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum DistanceMethod {
    ClosedForm,
    /// Projected-gradient foot-point iteration. `relative_accuracy` bounds
    /// the relative error of the distance by the squared tangential residual.
    Refined { iterations: usize, relative_accuracy: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryDistance {
    pub distance: f64,
    /// Nearest boundary point.
    pub foot: ComplexPoint,
    /// False when the nearest boundary point is known not to be unique.
    pub unique: bool,
    pub method: DistanceMethod,
}

const FOOT_TOL: f64 = 1e-12;
const MAX_ITER: usize = 500;

/// Distance from an interior point to the boundary of the domain.
pub fn boundary_distance(domain: &Domain, z: &ComplexPoint) -> Result<BoundaryDistance> {
    z.check_dim(domain.dim())?;
    if !domain.contains_unchecked(z) {
        return Err(Error::OutsideDomain { rho: domain.rho(z) });
    }
    distance_inner(domain, z)
}

fn distance_inner(domain: &Domain, z: &ComplexPoint) -> Result<BoundaryDistance> {
    match domain.shape_kind() {
        ShapeKind::Ball => {
            let r = z.norm();
            let (foot, unique) = match z.normalized() {
                Some(u) => (u, true),
                None => (ComplexPoint::basis(z.dim(), 0), false),
            };
            Ok(BoundaryDistance { distance: 1.0 - r, foot, unique, method: DistanceMethod::ClosedForm })
        }
        ShapeKind::Polydisc(radii) => {
            let gaps: Vec<f64> = z.coords().iter().zip(radii).map(|(zi, r)| r - zi.norm()).collect();
            let k = (0..gaps.len()).min_by(|&a, &b| gaps[a].total_cmp(&gaps[b])).unwrap_or(0);
            let ties = gaps.iter().filter(|g| (*g - gaps[k]).abs() < 1e-12).count();
            let mut foot = z.clone();
            let unique = ties == 1 && z[k].norm() > 0.0;
            foot[k] = if z[k].norm() > 0.0 { z[k] / z[k].norm() * radii[k] } else { C64::new(radii[k], 0.0) };
            Ok(BoundaryDistance { distance: gaps[k], foot, unique, method: DistanceMethod::ClosedForm })
        }
        ShapeKind::Ellipsoid(a) => Ok(ellipsoid_distance(a, z)),
        ShapeKind::General => refine(domain, z),
        ShapeKind::Shifted(inner, motion) => {
            let x = motion.apply_inverse(z);
            let mut d = distance_inner(inner, &x)?;
            d.foot = motion.apply(&d.foot);
            Ok(d)
        }
        ShapeKind::Localized(inner, window) => {
            let di = distance_inner(inner, z)?;
            let dw = Domain::window_distance(window, z);
            if di.distance <= dw {
                Ok(BoundaryDistance { unique: di.unique && (dw - di.distance).abs() > 1e-12, ..di })
            } else {
                let foot = window_foot(window, z);
                Ok(BoundaryDistance {
                    distance: dw,
                    foot,
                    unique: (dw - di.distance).abs() > 1e-12,
                    method: DistanceMethod::ClosedForm,
                })
            }
        }
    }
}

fn window_foot(window: &crate::geometry::domain::Window, z: &ComplexPoint) -> ComplexPoint {
    use crate::geometry::domain::Window;
    match window {
        Window::HalfSpace { normal, offset } => {
            let h = z.inner(normal).re - offset;
            z - &normal.scale_real(h)
        }
        Window::Ball { center, radius } => {
            let d = z - center;
            let u = d.normalized().unwrap_or_else(|| ComplexPoint::basis(z.dim(), 0));
            center + &u.scale_real(*radius)
        }
    }
}

/// Nearest point on `sum a_i |w_i|^2 = 1` through the Lagrange condition
/// `w_i = z_i / (1 + mu a_i)`, `mu` in `(-1/a_max, 0]`.
fn ellipsoid_distance(a: &[f64], z: &ComplexPoint) -> BoundaryDistance {
    let c: Vec<f64> = z.coords().iter().map(|w| w.norm_sqr()).collect();
    let a_max = a.iter().cloned().fold(0.0, f64::max);
    let on_max: Vec<bool> = a.iter().map(|&ai| ai >= a_max * (1.0 - 1e-15)).collect();
    let f = |mu: f64| -> f64 {
        a.iter().zip(&c).filter(|(_, ci)| **ci > 0.0).map(|(ai, ci)| ai * ci / (1.0 + mu * ai).powi(2)).sum::<f64>() - 1.0
    };
    let max_mass: f64 = c.iter().zip(&on_max).filter(|(_, &m)| m).map(|(ci, _)| *ci).sum();
    let lower = -1.0 / a_max;
    // Hard case: no root before the pole because z has no weight on the
    // longest-curvature coordinates.
    let hard = max_mass <= 1e-300 && f(lower) <= 0.0;
    if hard {
        let mut foot = z.clone();
        let mut s = 0.0;
        for i in 0..a.len() {
            if !on_max[i] {
                foot[i] = z[i] / (1.0 - a[i] / a_max);
                s += a[i] * foot[i].norm_sqr();
            }
        }
        let rest = ((1.0 - s) / a_max).max(0.0);
        let k = on_max.iter().position(|&m| m).unwrap_or(0);
        foot[k] = C64::new(rest.sqrt(), 0.0);
        let distance = z.distance(&foot);
        return BoundaryDistance { distance, foot, unique: rest == 0.0, method: DistanceMethod::ClosedForm };
    }
    // f is decreasing on (lower, 0] with f(0) < 0 for interior z.
    let (mut lo, mut hi) = (lower, 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = 0.5 * (lo + hi);
    let foot = ComplexPoint(z.coords().iter().zip(a).map(|(zi, ai)| zi / (1.0 + mu * ai)).collect());
    BoundaryDistance { distance: z.distance(&foot), foot, unique: true, method: DistanceMethod::ClosedForm }
}

fn real_dot(a: &ComplexPoint, b: &ComplexPoint) -> f64 {
    a.inner(b).re
}

/// Newton projection onto `{rho = 0}` along the gradient.
fn project(domain: &Domain, mut w: ComplexPoint) -> Result<ComplexPoint> {
    for _ in 0..100 {
        let jet = domain.defining_jet(&w)?;
        let g = jet.gradient();
        let gn2 = g.norm_sqr();
        if gn2 == 0.0 {
            return Err(Error::DegenerateGradient);
        }
        if jet.value.abs() < 1e-15 * gn2.sqrt() {
            return Ok(w);
        }
        w = &w - &g.scale_real(jet.value / gn2);
    }
    Err(Error::NonConvergence("projection onto the boundary".into()))
}

fn refine(domain: &Domain, z: &ComplexPoint) -> Result<BoundaryDistance> {
    let mut w = project(domain, z.clone())?;
    for it in 1..=MAX_ITER {
        let jet = domain.defining_jet(&w)?;
        let g = jet.gradient();
        let gn = g.norm();
        if gn == 0.0 {
            return Err(Error::DegenerateGradient);
        }
        let nrm = g.scale_real(1.0 / gn);
        let d = z - &w;
        let dn = d.norm();
        let along = real_dot(&d, &nrm);
        let tangential = (&d - &nrm.scale_real(along)).norm();
        let residual = if dn > 0.0 { tangential / dn } else { 0.0 };
        if residual < FOOT_TOL && jet.value.abs() < 1e-12 * gn {
            return Ok(BoundaryDistance {
                distance: dn,
                foot: w,
                unique: true,
                method: DistanceMethod::Refined { iterations: it, relative_accuracy: (residual * residual).max(f64::EPSILON) },
            });
        }
        // Foot of z on the tangent plane at w, pulled back to the surface.
        let candidate = &w + &(&d - &nrm.scale_real(along));
        w = project(domain, candidate)?;
    }
    Err(Error::NonConvergence("boundary foot-point iteration".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;

    #[test]
    fn closed_form_examples() {
        let ball = Domain::new(DomainSpec::UnitBall { n: 2 }).unwrap();
        let d = boundary_distance(&ball, &ComplexPoint::real(&[0.9, 0.0])).unwrap();
        assert!((d.distance - 0.1).abs() < 1e-15);
        let d0 = boundary_distance(&ball, &ComplexPoint::zeros(2)).unwrap();
        assert_eq!(d0.distance, 1.0);
        assert!(!d0.unique);
        assert!(boundary_distance(&ball, &ComplexPoint::real(&[1.0, 0.0])).is_err());
    }

    /// Brute-force sweep over the ellipsoid surface parametrised by
    /// `w = (cos s e^{ia}, sin s e^{ib} / sqrt(2))`.
    fn ellipsoid_bruteforce(z: &ComplexPoint) -> f64 {
        let m = 400;
        let mut best = f64::INFINITY;
        for i in 0..=m {
            let s = std::f64::consts::FRAC_PI_2 * i as f64 / m as f64;
            for j in 0..m {
                let alpha = std::f64::consts::TAU * j as f64 / m as f64;
                for k in 0..m / 8 {
                    let beta = std::f64::consts::TAU * k as f64 / (m / 8) as f64;
                    let w = ComplexPoint(vec![
                        C64::from_polar(s.cos(), alpha),
                        C64::from_polar(s.sin() / 2f64.sqrt(), beta),
                    ]);
                    best = best.min(z.distance(&w));
                }
            }
        }
        best
    }

    #[test]
    fn ellipsoid_center_distance() {
        let ell = Domain::new(DomainSpec::Ellipsoid { n: 2, coefficients: vec![1.0, 2.0] }).unwrap();
        let d = boundary_distance(&ell, &ComplexPoint::zeros(2)).unwrap();
        let oracle = ellipsoid_bruteforce(&ComplexPoint::zeros(2));
        assert!((oracle - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        assert!((d.distance - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12, "{d:?}");
    }

    #[test]
    fn ellipsoid_generic_point_matches_sweep() {
        let ell = Domain::new(DomainSpec::Ellipsoid { n: 2, coefficients: vec![1.0, 2.0] }).unwrap();
        let z = ComplexPoint(vec![C64::new(0.3, 0.1), C64::new(0.0, 0.0)]);
        let d = boundary_distance(&ell, &z).unwrap();
        // the sweep is exact when the foot lies on a grid phase
        let oracle = ellipsoid_bruteforce(&z);
        assert!(d.distance <= oracle + 1e-12);
        assert!((d.distance - oracle).abs() < 2e-3);
    }

    #[test]
    fn refinement_agrees_with_closed_form() {
        // Shifted by zero but routed through the general iteration via a
        // perturbed ball with t = 0.
        let pb = Domain::new(DomainSpec::perturbed_ball(2, 0.0)).unwrap();
        let z = ComplexPoint(vec![C64::new(0.4, -0.3), C64::new(0.2, 0.5)]);
        let d = boundary_distance(&pb, &z).unwrap();
        assert!((d.distance - (1.0 - z.norm())).abs() < 1e-12);
        assert!(matches!(d.method, DistanceMethod::Refined { .. }));
    }

    #[test]
    fn refinement_matches_ellipsoid_shape() {
        // rho = |z|^2 - 1 + t Re(z1^2) is a real ellipsoid; compare with a
        // dense sweep of its boundary in the z1-plane at z2 = 0.
        let t = 0.3;
        let pb = Domain::new(DomainSpec::perturbed_ball(2, t)).unwrap();
        let z = ComplexPoint::real(&[0.2, 0.0]);
        let d = boundary_distance(&pb, &z).unwrap();
        let mut best = f64::INFINITY;
        let m = 200000;
        for i in 0..m {
            let th = std::f64::consts::TAU * i as f64 / m as f64;
            let (c, s) = (th.cos(), th.sin());
            // x^2 (1 + t) + y^2 (1 - t) = 1
            let r = 1.0 / (c * c * (1.0 + t) + s * s * (1.0 - t)).sqrt();
            best = best.min(((r * c - 0.2).powi(2) + (r * s).powi(2)).sqrt());
        }
        assert!((d.distance - best).abs() < 1e-8, "{} vs {}", d.distance, best);
    }

    #[test]
    fn first_order_bound_on_collar() {
        let ell = Domain::new(DomainSpec::Ellipsoid { n: 2, coefficients: vec![1.0, 2.0] }).unwrap();
        // min |grad rho| on the collar 0.9 <= sum a|z|^2 < 1 is at least 2 * 0.9^(1/2) * a_min
        for k in 1..20 {
            let z = ComplexPoint::real(&[1.0 - 0.005 * k as f64, 0.0]);
            let d = boundary_distance(&ell, &z).unwrap();
            let bound = ell.rho(&z).abs() / (2.0 * 0.9f64.sqrt());
            assert!(d.distance <= bound + 1e-15);
        }
    }
}
