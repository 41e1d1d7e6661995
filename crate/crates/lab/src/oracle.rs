//! Closed-form spot checks of the curvature pipeline.

use crate::error::{invalid, Result};
use crate::experiments::{random_direction, random_in_ball, rng};
use bergman_core::curvature::sectional_curvature;
use bergman_core::kernel::ClosedFormKernel;
use bergman_core::ComplexPoint;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub kernel: String,
    pub points: usize,
    pub max_radius: f64,
    pub max_error: f64,
}

/// `-4/(n+1)` on the ball.
pub fn ball_curvature(n: usize) -> f64 {
    -4.0 / (n as f64 + 1.0)
}

/// Curvature of the product of discs of radii `r_i`: each factor has metric
/// `g_i = 2 r_i^2 / (r_i^2 - |z_i|^2)^2` and curvature -2, so
/// `S = -2 sum g_i^2 |xi_i|^4 / (sum g_i |xi_i|^2)^2`.
pub fn polydisc_curvature(radii: &[f64], p: &ComplexPoint, xi: &ComplexPoint) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for ((&r, z), x) in radii.iter().zip(p.coords()).zip(xi.coords()) {
        let g = 2.0 * r * r / (r * r - z.norm_sqr()).powi(2);
        num += g * g * x.norm_sqr().powi(2);
        den += g * x.norm_sqr();
    }
    -2.0 * num / (den * den)
}

/// Largest `|S - S_exact|` over random points with `|p_i| <= max_radius r_i`
/// (polydisc) or `|p| <= max_radius` (ball) and random directions.
pub fn check(kernel: &ClosedFormKernel, points: usize, max_radius: f64, seed: u64) -> Result<OracleReport> {
    if !(max_radius > 0.0 && max_radius < 1.0) {
        return invalid("max radius must lie in (0, 1)");
    }
    let mut r = rng(seed, 0);
    let mut max_error: f64 = 0.0;
    let name = match kernel {
        ClosedFormKernel::UnitBall { n } => format!("ball(n={n})"),
        ClosedFormKernel::Polydisc { radii } => format!("polydisc(radii={radii:?})"),
    };
    for _ in 0..points {
        let (p, exact_fn): (ComplexPoint, Box<dyn Fn(&ComplexPoint) -> f64>) = match kernel {
            ClosedFormKernel::UnitBall { n } => {
                let n = *n;
                (random_in_ball(&mut r, n, max_radius), Box::new(move |_| ball_curvature(n)))
            }
            ClosedFormKernel::Polydisc { radii } => {
                let n = radii.len();
                let u = random_in_ball(&mut r, n, 1.0);
                let p = ComplexPoint::new(
                    u.coords()
                        .iter()
                        .zip(radii)
                        .map(|(c, &rad)| c * rad * max_radius)
                        .collect(),
                );
                let pc = p.clone();
                let radii = radii.clone();
                (p, Box::new(move |xi| polydisc_curvature(&radii, &pc, xi)))
            }
        };
        let xi = random_direction(&mut r, p.dim());
        let s = sectional_curvature(kernel, &p, &xi)?.s;
        max_error = max_error.max((s - exact_fn(&xi)).abs());
    }
    Ok(OracleReport { kernel: name, points, max_radius, max_error })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_and_ball_constants() {
        let disc = check(&ClosedFormKernel::ball(1), 20, 0.9, 1).unwrap();
        assert!(disc.max_error < 1e-8, "{disc:?}");
        let pd = check(&ClosedFormKernel::polydisc(vec![1.0, 0.5]), 20, 0.8, 2).unwrap();
        assert!(pd.max_error < 1e-8, "{pd:?}");
    }
}
