use super::ScalingChain;
use crate::error::{Error, Result};
use crate::geometry::{sample_interior, ComplexPoint, Domain, DomainSpec, SamplePlan, Window};
use crate::parallel;
use serde::Serialize;

/// Radius of the coordinate ball `U` around the boundary point.
pub const DEFAULT_WINDOW_RADIUS: f64 = 0.25;

/// Failed inversions tolerated by the inner inclusion, as a fraction.
const FAILURE_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub r: f64,
    pub dist: f64,
    pub lambda: f64,
    pub inner_ok: bool,
    pub outer_ok: bool,
    /// Largest `|sigma(x)|` over sampled `x` in `Omega cap U`.
    pub outer_margin: f64,
    /// Smallest `|y|` among sampled `y` in `(1-r)B` without a preimage in
    /// `Omega cap U`; absent when every point has one.
    pub inner_margin: Option<f64>,
    pub outer_violations: usize,
    pub inner_violations: usize,
    pub newton_failures: usize,
    pub outer_samples: usize,
    pub inner_samples: usize,
}

/// The first `target` accepted quasi-Monte Carlo points of `domain`,
/// doubling the raw point count until enough are accepted.
pub fn sample_count(domain: &Domain, target: usize, seed: u64) -> Result<Vec<ComplexPoint>> {
    if target == 0 {
        return Err(Error::EmptyInput("sample target"));
    }
    let mut raw = target;
    for _ in 0..24 {
        let pts = sample_interior(domain, &SamplePlan::quasi_mc(raw, seed))?;
        if pts.len() >= target {
            return Ok(pts.into_iter().take(target).map(|s| s.point).collect());
        }
        raw *= 2;
    }
    Err(Error::NoAcceptedPoints)
}

fn window_domain(domain: &Domain, chain: &ScalingChain, radius: f64) -> Result<Domain> {
    Domain::new(DomainSpec::Localized {
        n: domain.dim(),
        inner: Box::new(domain.spec().clone()),
        window: Window::Ball { center: chain.foot.clone(), radius },
    })
}

enum Preimage {
    Inside,
    Outside,
    Failed,
}

fn classify(chain: &ScalingChain, local: &Domain, y: &ComplexPoint) -> Preimage {
    match chain.inverse(y) {
        Ok(x) if local.contains_unchecked(&x) => Preimage::Inside,
        Ok(_) => Preimage::Outside,
        Err(_) => Preimage::Failed,
    }
}

/// Checks `(1-r)B subset sigma(Omega cap U) subset (1+r)B` on `samples`
/// points per side, with `U` the ball of radius `window` around the foot
/// point of the chain.
pub fn sandwich_check(
    chain: &ScalingChain,
    domain: &Domain,
    window: f64,
    r: f64,
    samples: usize,
    seed: u64,
) -> Result<SandwichReport> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidPlan(format!("sandwich radius {r} must lie in (0, 1)")));
    }
    let local = window_domain(domain, chain, window)?;
    let xs = sample_count(&local, samples, seed)?;
    let norms = parallel::map_slice(&xs, |x| chain.apply(x).norm());
    let outer_margin = norms.iter().cloned().fold(0.0, f64::max);
    let outer_violations = norms.iter().filter(|v| !(**v < 1.0 + r)).count();

    let ball = Domain::new(DomainSpec::UnitBall { n: domain.dim() })?;
    let ys: Vec<ComplexPoint> =
        sample_count(&ball, samples, seed.wrapping_add(1))?.into_iter().map(|y| y.scale_real(1.0 - r)).collect();
    let classes = parallel::map_slice(&ys, |y| classify(chain, &local, y));
    let mut inner_violations = 0;
    let mut newton_failures = 0;
    let mut inner_margin: Option<f64> = None;
    for (y, c) in ys.iter().zip(&classes) {
        match c {
            Preimage::Inside => {}
            Preimage::Outside => {
                inner_violations += 1;
                inner_margin = Some(inner_margin.map_or(y.norm(), |m| m.min(y.norm())));
            }
            Preimage::Failed => newton_failures += 1,
        }
    }
    Ok(SandwichReport {
        r,
        dist: chain.dist,
        lambda: chain.lambda,
        inner_ok: inner_violations == 0 && (newton_failures as f64) < FAILURE_FRACTION * ys.len() as f64,
        outer_ok: outer_violations == 0,
        outer_margin,
        inner_margin,
        outer_violations,
        inner_violations,
        newton_failures,
        outer_samples: xs.len(),
        inner_samples: ys.len(),
    })
}

/// Smallest `r` for which both sampled inclusions hold: the outer excess
/// `max |sigma(x)| - 1` and the inner deficit `1 - min |y|` over unit-ball
/// samples without a preimage (failed inversions count as missing).
pub fn minimal_feasible_r(chain: &ScalingChain, domain: &Domain, window: f64, samples: usize, seed: u64) -> Result<f64> {
    let local = window_domain(domain, chain, window)?;
    let xs = sample_count(&local, samples, seed)?;
    let outer = parallel::map_slice(&xs, |x| chain.apply(x).norm()).into_iter().fold(0.0, f64::max);
    let ball = Domain::new(DomainSpec::UnitBall { n: domain.dim() })?;
    let ys = sample_count(&ball, samples, seed.wrapping_add(1))?;
    let classes = parallel::map_slice(&ys, |y| classify(chain, &local, y));
    let inner = ys
        .iter()
        .zip(&classes)
        .filter(|(_, c)| !matches!(c, Preimage::Inside))
        .map(|(y, _)| 1.0 - y.norm())
        .fold(0.0, f64::max);
    Ok((outer - 1.0).max(0.0).max(inner))
}
