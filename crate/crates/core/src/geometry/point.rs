use crate::error::{check_dim, Result};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Index, IndexMut, Sub};

/// A point of `C^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComplexPoint(#[serde(with = "crate::serde_complex::vec")] pub Vec<C64>);

impl ComplexPoint {
    pub fn new(coords: Vec<C64>) -> Self {
        Self(coords)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![C64::new(0.0, 0.0); n])
    }

    /// Unit coordinate vector `e_k`.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut p = Self::zeros(n);
        p.0[k] = C64::new(1.0, 0.0);
        p
    }

    /// Builds a point from real parts only.
    pub fn real(xs: &[f64]) -> Self {
        Self(xs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[C64] {
        &self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Hermitian inner product `<z, w> = sum z_i conj(w_i)`.
    pub fn inner(&self, w: &ComplexPoint) -> C64 {
        self.0.iter().zip(&w.0).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn scale(&self, c: C64) -> ComplexPoint {
        Self(self.0.iter().map(|z| z * c).collect())
    }

    pub fn scale_real(&self, c: f64) -> ComplexPoint {
        Self(self.0.iter().map(|z| z * c).collect())
    }

    pub fn conj(&self) -> ComplexPoint {
        Self(self.0.iter().map(|z| z.conj()).collect())
    }

    /// Unit vector in the direction of `self`, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<ComplexPoint> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale_real(1.0 / n))
    }

    pub fn distance(&self, other: &ComplexPoint) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        check_dim(n, self.dim())
    }

    /// Interleaved real coordinates `(x_1, y_1, ..., x_n, y_n)`.
    pub fn to_real(&self) -> Vec<f64> {
        self.0.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    pub fn from_real(xs: &[f64]) -> Self {
        Self(xs.chunks(2).map(|c| C64::new(c[0], c[1])).collect())
    }
}

impl Index<usize> for ComplexPoint {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for ComplexPoint {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.0[i]
    }
}

impl Add for &ComplexPoint {
    type Output = ComplexPoint;
    fn add(self, rhs: &ComplexPoint) -> ComplexPoint {
        ComplexPoint(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &ComplexPoint {
    type Output = ComplexPoint;
    fn sub(self, rhs: &ComplexPoint) -> ComplexPoint {
        ComplexPoint(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl From<Vec<C64>> for ComplexPoint {
    fn from(v: Vec<C64>) -> Self {
        Self(v)
    }
}

/// Exponent vector of a monomial `z^alpha`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn unit(n: usize, k: usize) -> Self {
        let mut e = vec![0; n];
        e[k] = 1;
        Self(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        crate::error::check_dim(n, self.0.len())
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// `alpha! = prod alpha_i!`
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&a| factorial(a)).product()
    }

    /// Componentwise `self - other`, or `None` when some component would go
    /// negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| a.checked_sub(b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `prod binom(alpha_i, a_i)`; zero when `a` is not below `alpha`.
    pub fn binomial(&self, a: &MultiIndex) -> f64 {
        self.0
            .iter()
            .zip(&a.0)
            .map(|(&n, &k)| if k > n { 0.0 } else { binomial(n, k) })
            .product()
    }

    /// Evaluates `z^alpha`.
    pub fn monomial(&self, z: &[C64]) -> C64 {
        self.0
            .iter()
            .zip(z)
            .fold(C64::new(1.0, 0.0), |acc, (&e, &zi)| acc * zi.powu(e))
    }

    /// All multi-indices of dimension `n` and degree at most `max_degree`, in
    /// graded-lexicographic order (by degree, then lexicographically
    /// descending).
    pub fn graded(n: usize, max_degree: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for deg in 0..=max_degree {
            let mut cur = vec![0u32; n];
            push_degree(n, deg, 0, &mut cur, &mut out);
        }
        out
    }
}

fn push_degree(n: usize, remaining: u32, pos: usize, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if pos + 1 == n {
        cur[pos] = remaining;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for e in (0..=remaining).rev() {
        cur[pos] = e;
        push_degree(n, remaining - e, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

pub fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_count_is_binomial() {
        for n in 1..=3 {
            for d in 0..=8 {
                let idx = MultiIndex::graded(n, d);
                assert_eq!(idx.len() as f64, binomial(n as u32 + d, n as u32));
                assert!(idx.windows(2).all(|w| w[0].degree() <= w[1].degree()));
            }
        }
    }

    #[test]
    fn graded_order_small() {
        let idx = MultiIndex::graded(2, 2);
        let e: Vec<Vec<u32>> = idx.into_iter().map(|m| m.0).collect();
        assert_eq!(
            e,
            vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]
        );
    }

    #[test]
    fn inner_is_conjugate_linear_in_second_slot() {
        let z = ComplexPoint::new(vec![C64::new(1.0, 2.0), C64::new(0.5, -1.0)]);
        let w = ComplexPoint::new(vec![C64::new(-0.3, 0.1), C64::new(2.0, 0.0)]);
        let c = C64::new(0.0, 1.0);
        let lhs = z.inner(&w.scale(c));
        assert!((lhs - c.conj() * z.inner(&w)).norm() < 1e-15);
        assert!((z.inner(&w) - w.inner(&z).conj()).norm() < 1e-15);
    }
}
