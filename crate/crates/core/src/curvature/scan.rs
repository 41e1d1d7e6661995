use super::{metric_tensor, sectional_from_metric};
use crate::error::{Error, Result};
use crate::geometry::rigid::orthonormal_complement;
use crate::geometry::{boundary_distance, ComplexPoint, Domain};
use crate::kernel::BergmanKernel;
use crate::parallel;
use serde::{Deserialize, Serialize};

/// How far along the inward normal the scan points sit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "schedule", rename_all = "snake_case")]
pub enum ScanSchedule {
    /// `s_k = s0 * 2^{-k}` for `k < steps`.
    Geometric { s0: f64, steps: usize },
    /// Points whose boundary distance equals each target.
    Distances { targets: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub rung: usize,
    /// Ray parameter of `p = q + s n`.
    pub s: f64,
    pub dist: f64,
    pub direction_index: usize,
    pub xi: ComplexPoint,
    pub curvature: f64,
    /// `|S - target|`
    pub deviation: f64,
    pub imag_residue: f64,
    /// Empty for a clean row, otherwise the reason the value is missing.
    pub flag: String,
}

/// Inward unit normal at a boundary point and one unit tangent orthogonal
/// to it.
pub fn normal_and_tangent(domain: &Domain, q: &ComplexPoint) -> Result<(ComplexPoint, ComplexPoint)> {
    let jet = domain.defining_jet(q)?;
    let grad = jet.gradient();
    let n_in = grad.normalized().ok_or(Error::DegenerateGradient)?.scale_real(-1.0);
    let tangent = orthonormal_complement(&n_in)?.into_iter().next().ok_or(Error::ZeroDirection)?;
    Ok((n_in, tangent))
}

fn dist_along(domain: &Domain, q: &ComplexPoint, n_in: &ComplexPoint, s: f64) -> Option<f64> {
    let p = q + &n_in.scale_real(s);
    boundary_distance(domain, &p).ok().map(|d| d.distance)
}

/// Ray parameters of the schedule; distance targets are met by bisection.
pub fn resolve_ladder(domain: &Domain, q: &ComplexPoint, n_in: &ComplexPoint, schedule: &ScanSchedule) -> Result<Vec<f64>> {
    match schedule {
        ScanSchedule::Geometric { s0, steps } => Ok((0..*steps).map(|k| s0 * 0.5f64.powi(k as i32)).collect()),
        ScanSchedule::Distances { targets } => targets
            .iter()
            .map(|&target| {
                if !(target > 0.0) {
                    return Err(Error::InvalidPlan(format!("distance target {target} must be positive")));
                }
                // dist(q + s n) <= s, so the root lies above `target`.
                let mut lo = 0.0;
                let mut hi = target;
                loop {
                    match dist_along(domain, q, n_in, hi) {
                        Some(d) if d >= target => break,
                        Some(_) if hi < 2.0 * domain.bound_radius() => {
                            lo = hi;
                            hi *= 1.25;
                        }
                        _ => {
                            return Err(Error::NonConvergence(format!(
                                "no point at distance {target} on the normal ray"
                            )))
                        }
                    }
                }
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    match dist_along(domain, q, n_in, mid) {
                        Some(d) if d >= target => hi = mid,
                        _ => lo = mid,
                    }
                    if hi - lo < 1e-15 * hi {
                        break;
                    }
                }
                Ok(hi)
            })
            .collect(),
    }
}

/// Curvature along the inward normal ray at `q`, one row per (rung,
/// direction). Failures are flagged in place and the scan continues. Rows
/// are sorted by distance, farthest first.
pub fn klembeck_scan(
    kernel: &dyn BergmanKernel,
    domain: &Domain,
    q: &ComplexPoint,
    schedule: &ScanSchedule,
    directions: &[ComplexPoint],
    target: f64,
) -> Result<Vec<ScanRow>> {
    q.check_dim(domain.dim())?;
    if directions.is_empty() {
        return Ok(Vec::new());
    }
    let (n_in, _) = normal_and_tangent(domain, q)?;
    let ladder = resolve_ladder(domain, q, &n_in, schedule)?;
    let mut rows = parallel::map_indexed(ladder.len(), |rung| {
        let s = ladder[rung];
        let p = q + &n_in.scale_real(s);
        let dist = boundary_distance(domain, &p).map(|d| d.distance);
        let metric = metric_tensor(kernel, &p);
        directions
            .iter()
            .enumerate()
            .map(|(k, xi)| {
                let mut row = ScanRow {
                    rung,
                    s,
                    dist: f64::NAN,
                    direction_index: k,
                    xi: xi.normalized().unwrap_or_else(|| xi.clone()),
                    curvature: f64::NAN,
                    deviation: f64::NAN,
                    imag_residue: f64::NAN,
                    flag: String::new(),
                };
                match &dist {
                    Ok(d) => row.dist = *d,
                    Err(e) => row.flag = format!("distance: {e}"),
                }
                let sample = metric.as_ref().map_err(|e| e.to_string()).and_then(|m| {
                    sectional_from_metric(m, xi).map_err(|e| e.to_string())
                });
                match sample {
                    Ok(c) => {
                        row.curvature = c.s;
                        row.deviation = (c.s - target).abs();
                        row.imag_residue = c.imag_residue;
                    }
                    Err(e) => {
                        if row.flag.is_empty() {
                            row.flag = e;
                        }
                    }
                }
                row
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect::<Vec<_>>();
    rows.sort_by(|a, b| b.dist.total_cmp(&a.dist));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;
    use crate::kernel::ClosedFormKernel;

    #[test]
    fn ball_scan_is_constant() {
        let dom = Domain::new(DomainSpec::UnitBall { n: 2 }).unwrap();
        let q = ComplexPoint::basis(2, 0);
        let (n_in, t) = normal_and_tangent(&dom, &q).unwrap();
        let rows = klembeck_scan(
            &ClosedFormKernel::ball(2),
            &dom,
            &q,
            &ScanSchedule::Distances { targets: vec![0.3, 0.1, 0.03] },
            &[n_in, t],
            -4.0 / 3.0,
        )
        .unwrap();
        assert_eq!(rows.len(), 6);
        for r in &rows {
            assert!(r.flag.is_empty());
            assert!(r.deviation < 1e-9);
        }
        assert!((rows[0].dist - 0.3).abs() < 1e-12 && (rows[5].dist - 0.03).abs() < 1e-12);
    }

    #[test]
    fn empty_directions() {
        let dom = Domain::new(DomainSpec::UnitBall { n: 1 }).unwrap();
        let rows = klembeck_scan(
            &ClosedFormKernel::ball(1),
            &dom,
            &ComplexPoint::basis(1, 0),
            &ScanSchedule::Geometric { s0: 0.5, steps: 3 },
            &[],
            -2.0,
        )
        .unwrap();
        assert!(rows.is_empty());
    }

    #[test]
    fn ellipsoid_ladder_hits_targets() {
        let dom = Domain::new(DomainSpec::Ellipsoid { n: 2, coefficients: vec![1.0, 2.0] }).unwrap();
        let q = ComplexPoint::basis(2, 0);
        let (n_in, _) = normal_and_tangent(&dom, &q).unwrap();
        let s = resolve_ladder(&dom, &q, &n_in, &ScanSchedule::Distances { targets: vec![0.3, 0.03] }).unwrap();
        for (si, t) in s.iter().zip([0.3, 0.03]) {
            let d = boundary_distance(&dom, &(&q + &n_in.scale_real(*si))).unwrap().distance;
            assert!((d - t).abs() < 1e-10);
        }
    }
}
