use super::group::FiniteUnitaryGroup;
use crate::error::{Error, Result};
use crate::geometry::{boundary_distance, ComplexPoint, Domain};
use crate::C64;
use std::f64::consts::TAU;

/// Nodes of the trapezoid rule used to average over a circle action.
pub const CIRCLE_NODES: usize = 256;

/// Sum of the values in increasing order, so that any permutation of the
/// same values gives the same result.
fn ordered_mean(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len() as f64;
    v.into_iter().sum::<f64>() / k
}

/// `(1/|G|) sum_g rho(g z)`
pub fn average_exhaustion(group: &FiniteUnitaryGroup, rho: &dyn Fn(&ComplexPoint) -> f64, z: &ComplexPoint) -> Result<f64> {
    z.check_dim(group.dim())?;
    Ok(ordered_mean((0..group.order()).map(|k| rho(&group.apply(k, z))).collect()))
}

/// `rho_hat(z) <= alpha`
pub fn invariant_sublevel_indicator(
    group: &FiniteUnitaryGroup,
    rho: &dyn Fn(&ComplexPoint) -> f64,
    alpha: f64,
    z: &ComplexPoint,
) -> Result<bool> {
    Ok(average_exhaustion(group, rho, z)? <= alpha)
}

/// Average over the circle action `z_k -> e^{i w_k theta} z_k` with the
/// trapezoid rule on [`CIRCLE_NODES`] nodes.
pub fn circle_average(weights: &[i32], rho: &dyn Fn(&ComplexPoint) -> f64, z: &ComplexPoint) -> Result<f64> {
    z.check_dim(weights.len())?;
    let vals = (0..CIRCLE_NODES)
        .map(|j| {
            let theta = TAU * j as f64 / CIRCLE_NODES as f64;
            let w: Vec<C64> = z.coords().iter().zip(weights).map(|(c, &k)| c * C64::from_polar(1.0, k as f64 * theta)).collect();
            rho(&ComplexPoint(w))
        })
        .collect::<Vec<_>>();
    Ok(vals.iter().sum::<f64>() / CIRCLE_NODES as f64)
}

/// `{g p}` with duplicates (within `1e-12`) removed, in element order.
pub fn orbit(group: &FiniteUnitaryGroup, p: &ComplexPoint) -> Result<Vec<ComplexPoint>> {
    p.check_dim(group.dim())?;
    let mut out: Vec<ComplexPoint> = Vec::new();
    for k in 0..group.order() {
        let q = group.apply(k, p);
        if !out.iter().any(|x| x.distance(&q) <= 1e-12) {
            out.push(q);
        }
    }
    Ok(out)
}

/// Smallest boundary distance over the orbit of `p`.
pub fn orbit_boundary_distance(domain: &Domain, group: &FiniteUnitaryGroup, p: &ComplexPoint) -> Result<f64> {
    let mut best = f64::INFINITY;
    for q in orbit(group, p)? {
        if !domain.contains(&q)? {
            return Err(Error::OutsideDomain { rho: domain.rho(&q) });
        }
        best = best.min(boundary_distance(domain, &q)?.distance);
    }
    Ok(best)
}
