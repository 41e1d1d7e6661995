use super::BasisSpec;
use crate::error::{Error, Result};
use crate::geometry::{sample_interior, ComplexPoint, Domain, MultiIndex, ProductRule, SamplePlan};
use crate::parallel;
use crate::C64;
use nalgebra::DMatrix;
use std::collections::HashMap;

/// Relative off-diagonal size tolerated in the Gram matrix of a Reinhardt
/// domain before it is replaced by its diagonal.
pub const GRAM_DIAGONAL_TOL: f64 = 1e-10;

/// `G[a][b] = sum_s w_s z_s^a conj(z_s^b)` with monomials centered at the
/// domain's natural basis center.
pub fn gram_matrix(domain: &Domain, basis: &BasisSpec, plan: &SamplePlan) -> Result<DMatrix<C64>> {
    gram_matrix_centered(domain, basis, plan, &domain.basis_center())
}

/// Gram matrix of the monomials `(z - c)^a`.
pub fn gram_matrix_centered(
    domain: &Domain,
    basis: &BasisSpec,
    plan: &SamplePlan,
    center: &ComplexPoint,
) -> Result<DMatrix<C64>> {
    crate::error::check_dim(domain.dim(), basis.n)?;
    center.check_dim(domain.dim())?;
    match plan.product_rule(domain)? {
        Some(rule) => {
            if rule.len() < basis.len() {
                return Err(Error::UnderdeterminedGram { samples: rule.len(), basis: basis.len() });
            }
            if center.norm() != 0.0 {
                return Err(Error::InvalidPlan("product quadrature needs monomials centered at the origin".into()));
            }
            Ok(product_gram(&rule, &basis.indices))
        }
        None => {
            let samples = sample_interior(domain, plan)?;
            if samples.len() < basis.len() {
                return Err(Error::UnderdeterminedGram { samples: samples.len(), basis: basis.len() });
            }
            let m = basis.len();
            let g = parallel::blocked_reduce(
                samples.len(),
                DMatrix::<C64>::zeros(m, m),
                |range| {
                    let mut acc = DMatrix::<C64>::zeros(m, m);
                    let mut v = vec![C64::new(0.0, 0.0); m];
                    for s in &samples[range] {
                        let x = &s.point - center;
                        for (k, a) in basis.indices.iter().enumerate() {
                            v[k] = a.monomial(x.coords());
                        }
                        for b in 0..m {
                            let wb = v[b].conj() * s.weight;
                            for a in 0..=b {
                                acc[(a, b)] += v[a] * wb;
                            }
                        }
                    }
                    acc
                },
                |x, y| x + y,
            );
            Ok(mirror_upper(g))
        }
    }
}

fn mirror_upper(mut g: DMatrix<C64>) -> DMatrix<C64> {
    let m = g.nrows();
    for b in 0..m {
        g[(b, b)].im = 0.0;
        for a in 0..b {
            g[(b, a)] = g[(a, b)].conj();
        }
    }
    g
}

/// Product-rule Gram matrix without materializing the point set: each entry
/// is a radial moment times per-coordinate angular sums.
fn product_gram(rule: &ProductRule, indices: &[MultiIndex]) -> DMatrix<C64> {
    let n = rule.n;
    let max_deg = indices.iter().map(|a| a.degree()).max().unwrap_or(0) as usize;
    let m = rule.angular;
    // A(k) = sum_j (2 pi / m) e^{i k theta_j}
    let angular: Vec<C64> = (0..=2 * max_deg)
        .map(|s| {
            let k = s as f64 - max_deg as f64;
            (0..m).map(|j| C64::from_polar(rule.angular_weight(), k * rule.angle(j))).sum()
        })
        .collect();
    let exps: Vec<MultiIndex> = MultiIndex::graded(n, 2 * max_deg as u32);
    let moments = parallel::map_slice(&exps, |e| {
        let mut s = 0.0;
        for (t, w) in rule.radial.nodes.iter().zip(&rule.radial.weights) {
            let mut p = *w;
            for (ti, ei) in t.iter().zip(&e.0) {
                p *= ti.sqrt().powi(*ei as i32);
            }
            s += p;
        }
        s
    });
    let moment: HashMap<&MultiIndex, f64> = exps.iter().zip(moments).collect();
    let size = indices.len();
    let rows = parallel::map_indexed(size, |a| {
        (0..size)
            .map(|b| {
                let (ia, ib) = (&indices[a], &indices[b]);
                let e = ia.add(ib);
                let mut v = C64::new(moment[&e], 0.0);
                for i in 0..n {
                    let k = ia.0[i] as i64 - ib.0[i] as i64 + max_deg as i64;
                    v *= angular[k as usize];
                }
                v
            })
            .collect::<Vec<_>>()
    });
    let mut g = DMatrix::<C64>::zeros(size, size);
    for (a, row) in rows.into_iter().enumerate() {
        for (b, v) in row.into_iter().enumerate() {
            g[(a, b)] = v;
        }
    }
    mirror_upper(g)
}

/// Replaces a Reinhardt Gram matrix by its diagonal. With `strict`, fails if
/// an off-diagonal entry exceeds `GRAM_DIAGONAL_TOL * sqrt(G_aa G_bb)`.
pub(crate) fn diagonalize(g: &DMatrix<C64>, strict: bool) -> Result<DMatrix<C64>> {
    let m = g.nrows();
    if strict {
        let mut worst = 0.0f64;
        for a in 0..m {
            for b in (a + 1)..m {
                let scale = (g[(a, a)].re * g[(b, b)].re).sqrt();
                if scale > 0.0 {
                    worst = worst.max(g[(a, b)].norm() / scale);
                }
            }
        }
        if worst > GRAM_DIAGONAL_TOL {
            return Err(Error::NonDiagonalGram { ratio: worst });
        }
    }
    let mut d = DMatrix::<C64>::zeros(m, m);
    for a in 0..m {
        d[(a, a)] = C64::new(g[(a, a)].re, 0.0);
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;
    use std::f64::consts::PI;

    #[test]
    fn disc_gram_is_diagonal() {
        let d = Domain::new(DomainSpec::UnitBall { n: 1 }).unwrap();
        let g = gram_matrix(&d, &BasisSpec::new(1, 3), &SamplePlan::product(16, 16)).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let want = if a == b { PI / (a as f64 + 1.0) } else { 0.0 };
                assert!((g[(a, b)] - C64::new(want, 0.0)).norm() < 1e-12, "{a} {b}");
            }
        }
    }

    #[test]
    fn product_gram_matches_materialized_points() {
        let d = Domain::new(DomainSpec::Ellipsoid { n: 2, coefficients: vec![1.0, 2.0] }).unwrap();
        let basis = BasisSpec::new(2, 3);
        let plan = SamplePlan::product(6, 8);
        let g = gram_matrix(&d, &basis, &plan).unwrap();
        let rule = plan.product_rule(&d).unwrap().unwrap();
        let samples = rule.samples();
        for (a, ia) in basis.indices.iter().enumerate() {
            for (b, ib) in basis.indices.iter().enumerate() {
                let direct: C64 = samples
                    .iter()
                    .map(|s| ia.monomial(s.point.coords()) * ib.monomial(s.point.coords()).conj() * s.weight)
                    .sum();
                assert!((direct - g[(a, b)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_basis_gives_volume() {
        let d = Domain::new(DomainSpec::UnitBall { n: 2 }).unwrap();
        let g = gram_matrix(&d, &BasisSpec::new(2, 0), &SamplePlan::product(8, 1)).unwrap();
        assert!((g[(0, 0)].re - PI * PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn underdetermined() {
        let d = Domain::new(DomainSpec::UnitBall { n: 1 }).unwrap();
        let r = gram_matrix(&d, &BasisSpec::new(1, 5), &SamplePlan::quasi_mc(3, 0));
        assert!(matches!(r, Err(Error::UnderdeterminedGram { .. })));
    }
}
