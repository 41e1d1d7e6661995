//! Deterministic point sets and quadrature weights over domain interiors.

use crate::error::{Error, Result};
use crate::geometry::domain::{BoundingBox, Domain, ReinhardtProfile};
use crate::geometry::quadrature::gauss_legendre_on;
use crate::geometry::ComplexPoint;
use crate::parallel;
use crate::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LowDiscrepancy {
    /// Halton sequence with a seeded Cranley-Patterson rotation.
    Halton,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum SamplePlan {
    /// Rejection sampling of a low-discrepancy sequence inside a box. When
    /// `bounding_box` is omitted the domain's own box is used.
    QuasiMc {
        #[serde(default = "default_sequence")]
        sequence: LowDiscrepancy,
        points: usize,
        #[serde(default)]
        seed: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bounding_box: Option<BoundingBox>,
    },
    /// Gauss-Legendre in the squared moduli times a uniform angular rule, per
    /// coordinate. Reinhardt domains only. The seed is unused.
    Product {
        radial: usize,
        angular: usize,
        #[serde(default)]
        seed: u64,
    },
}

fn default_sequence() -> LowDiscrepancy {
    LowDiscrepancy::Halton
}

impl SamplePlan {
    pub fn quasi_mc(points: usize, seed: u64) -> Self {
        SamplePlan::QuasiMc { sequence: LowDiscrepancy::Halton, points, seed, bounding_box: None }
    }

    pub fn product(radial: usize, angular: usize) -> Self {
        SamplePlan::Product { radial, angular, seed: 0 }
    }

    pub fn seed(&self) -> u64 {
        match self {
            SamplePlan::QuasiMc { seed, .. } | SamplePlan::Product { seed, .. } => *seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        let mut p = self.clone();
        match &mut p {
            SamplePlan::QuasiMc { seed: s, .. } | SamplePlan::Product { seed: s, .. } => *s = seed,
        }
        p
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub point: ComplexPoint,
    pub weight: f64,
}

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    r
}

/// Point `index` of the rotated Halton sequence in `[0,1)^dim`.
pub fn halton_point(index: u64, shift: &[f64]) -> Vec<f64> {
    shift
        .iter()
        .enumerate()
        .map(|(d, s)| {
            let u = radical_inverse(index + 1, PRIMES[d]) + s;
            u - u.floor()
        })
        .collect()
}

pub fn halton_shift(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dim).map(|_| rng.gen::<f64>()).collect()
}

/// Radial part of a product rule: squared-moduli nodes `t` with weights
/// that already include the `(1/2)^n` Jacobian of `r -> t = r^2`.
#[derive(Debug, Clone)]
pub struct RadialRule {
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

/// Tensor-product rule for a Reinhardt domain.
#[derive(Debug, Clone)]
pub struct ProductRule {
    pub n: usize,
    pub radial: RadialRule,
    pub angular: usize,
}

impl ProductRule {
    pub fn new(profile: &ReinhardtProfile, radial: usize, angular: usize) -> Result<Self> {
        if radial == 0 || angular == 0 {
            return Err(Error::InvalidPlan("product rule needs at least one node per factor".into()));
        }
        let rule = match profile {
            ReinhardtProfile::Box(r2) => box_rule(r2, radial),
            ReinhardtProfile::Simplex(a) => simplex_rule(a, radial),
        };
        let n = match profile {
            ReinhardtProfile::Box(v) | ReinhardtProfile::Simplex(v) => v.len(),
        };
        Ok(Self { n, radial: rule, angular })
    }

    pub fn angle(&self, j: usize) -> f64 {
        TAU * j as f64 / self.angular as f64
    }

    pub fn angular_weight(&self) -> f64 {
        TAU / self.angular as f64
    }

    pub fn len(&self) -> usize {
        self.radial.nodes.len() * self.angular.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All points with weights, radial tuple major, angles in odometer order.
    pub fn samples(&self) -> Vec<Sample> {
        let n = self.n;
        let per = self.angular.pow(n as u32);
        let aw = self.angular_weight().powi(n as i32);
        let chunks = parallel::map_indexed(self.radial.nodes.len(), |k| {
            let t = &self.radial.nodes[k];
            let r: Vec<f64> = t.iter().map(|x| x.sqrt()).collect();
            let w = self.radial.weights[k] * aw;
            (0..per)
                .map(|mut idx| {
                    let mut z = Vec::with_capacity(n);
                    for ri in &r {
                        let j = idx % self.angular;
                        idx /= self.angular;
                        z.push(C64::from_polar(*ri, self.angle(j)));
                    }
                    Sample { point: ComplexPoint(z), weight: w }
                })
                .collect::<Vec<_>>()
        });
        chunks.into_iter().flatten().collect()
    }
}

fn box_rule(r2: &[f64], m: usize) -> RadialRule {
    let per: Vec<(Vec<f64>, Vec<f64>)> = r2.iter().map(|&b| gauss_legendre_on(m, 0.0, b)).collect();
    let n = r2.len();
    let total = m.pow(n as u32);
    let mut nodes = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    for mut idx in 0..total {
        let mut t = Vec::with_capacity(n);
        let mut w = 0.5f64.powi(n as i32);
        for (x, wx) in &per {
            let j = idx % m;
            idx /= m;
            t.push(x[j]);
            w *= wx[j];
        }
        nodes.push(t);
        weights.push(w);
    }
    RadialRule { nodes, weights }
}

/// Nested (conical) Gauss-Legendre rule on `{u >= 0, sum u_i <= 1}` mapped
/// to `t_i = u_i / a_i`.
fn simplex_rule(a: &[f64], m: usize) -> RadialRule {
    let n = a.len();
    let jac: f64 = a.iter().map(|x| 1.0 / x).product::<f64>() * 0.5f64.powi(n as i32);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut u = vec![0.0; n];
    fn recurse(
        level: usize,
        budget: f64,
        w: f64,
        m: usize,
        a: &[f64],
        u: &mut Vec<f64>,
        nodes: &mut Vec<Vec<f64>>,
        weights: &mut Vec<f64>,
    ) {
        if level == a.len() {
            nodes.push(u.iter().zip(a).map(|(ui, ai)| ui / ai).collect());
            weights.push(w);
            return;
        }
        let (x, wx) = gauss_legendre_on(m, 0.0, budget);
        for j in 0..m {
            u[level] = x[j];
            recurse(level + 1, budget - x[j], w * wx[j], m, a, u, nodes, weights);
        }
    }
    recurse(0, 1.0, jac, m, a, &mut u, &mut nodes, &mut weights);
    RadialRule { nodes, weights }
}

impl SamplePlan {
    /// Checks the plan against a domain and returns the effective box for
    /// quasi-Monte Carlo plans.
    pub fn validate(&self, domain: &Domain) -> Result<()> {
        match self {
            SamplePlan::QuasiMc { points, bounding_box, .. } => {
                if *points == 0 {
                    return Err(Error::InvalidPlan("point count must be positive".into()));
                }
                if 2 * domain.dim() > PRIMES.len() {
                    return Err(Error::InvalidPlan("dimension too large for the Halton sequence".into()));
                }
                if let Some(b) = bounding_box {
                    if b.lo.len() != 2 * domain.dim() || b.hi.len() != 2 * domain.dim() {
                        return Err(Error::InvalidPlan("bounding box dimension mismatch".into()));
                    }
                    if !b.contains_box(domain.bounding_box()) {
                        return Err(Error::InvalidPlan("bounding box does not enclose the domain".into()));
                    }
                }
                Ok(())
            }
            SamplePlan::Product { radial, angular, .. } => {
                if domain.reinhardt_profile().is_none() {
                    return Err(Error::InvalidPlan("product quadrature requires a Reinhardt domain".into()));
                }
                if *radial == 0 || *angular == 0 {
                    return Err(Error::InvalidPlan("product rule needs at least one node per factor".into()));
                }
                Ok(())
            }
        }
    }

    pub fn product_rule(&self, domain: &Domain) -> Result<Option<ProductRule>> {
        match self {
            SamplePlan::Product { radial, angular, .. } => {
                self.validate(domain)?;
                let profile = domain.reinhardt_profile().expect("validated");
                Ok(Some(ProductRule::new(&profile, *radial, *angular)?))
            }
            _ => Ok(None),
        }
    }
}

/// Interior points with quadrature weights. The weights sum to an estimate
/// of the 2n-dimensional volume. Pure function of `(domain, plan)`.
pub fn sample_interior(domain: &Domain, plan: &SamplePlan) -> Result<Vec<Sample>> {
    plan.validate(domain)?;
    let samples = match plan {
        SamplePlan::QuasiMc { points, seed, bounding_box, .. } => {
            let bbox = bounding_box.clone().unwrap_or_else(|| domain.bounding_box().clone());
            let dim = 2 * domain.dim();
            let shift = halton_shift(dim, *seed);
            let w = bbox.volume() / *points as f64;
            let blocks = points.div_ceil(parallel::BLOCK);
            let chunks = parallel::map_indexed(blocks, |b| {
                let start = b * parallel::BLOCK;
                let end = (start + parallel::BLOCK).min(*points);
                (start..end)
                    .filter_map(|i| {
                        let u = halton_point(i as u64, &shift);
                        let x: Vec<f64> = u
                            .iter()
                            .enumerate()
                            .map(|(d, ud)| bbox.lo[d] + ud * (bbox.hi[d] - bbox.lo[d]))
                            .collect();
                        let z = ComplexPoint::from_real(&x);
                        domain.contains_unchecked(&z).then_some(Sample { point: z, weight: w })
                    })
                    .collect::<Vec<_>>()
            });
            chunks.into_iter().flatten().collect::<Vec<_>>()
        }
        SamplePlan::Product { .. } => {
            let rule = plan.product_rule(domain)?.expect("product plan");
            rule.samples().into_iter().filter(|s| domain.contains_unchecked(&s.point)).collect()
        }
    };
    if samples.is_empty() {
        return Err(Error::NoAcceptedPoints);
    }
    Ok(samples)
}
