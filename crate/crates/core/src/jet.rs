//! Truncated multivariate Taylor polynomials ("jets").
//!
//! A [`Jet`] stores the Taylor coefficients of a function of `nvars` complex
//! variables up to a fixed total order. Products, power series and `log` are
//! exact within the truncation, which lets kernel derivatives and the
//! derivatives of `log K` be computed without any differencing.

use crate::geometry::MultiIndex;
use crate::C64;
use std::collections::HashMap;
use std::sync::Arc;

#[derive(Debug)]
pub struct JetSpace {
    nvars: usize,
    order: u32,
    monomials: Vec<MultiIndex>,
    index: HashMap<MultiIndex, usize>,
    /// `(i, j, k)` with `monomials[i] + monomials[j] = monomials[k]`.
    products: Vec<(usize, usize, usize)>,
}

impl JetSpace {
    pub fn new(nvars: usize, order: u32) -> Arc<Self> {
        let monomials = MultiIndex::graded(nvars, order);
        let index: HashMap<MultiIndex, usize> = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut products = Vec::new();
        for (i, a) in monomials.iter().enumerate() {
            for (j, b) in monomials.iter().enumerate() {
                if a.degree() + b.degree() <= order {
                    products.push((i, j, index[&a.add(b)]));
                }
            }
        }
        Arc::new(Self { nvars, order, monomials, index, products })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[MultiIndex] {
        &self.monomials
    }

    pub fn position(&self, m: &MultiIndex) -> Option<usize> {
        self.index.get(m).copied()
    }
}

#[derive(Debug, Clone)]
pub struct Jet {
    space: Arc<JetSpace>,
    coeffs: Vec<C64>,
}

impl Jet {
    pub fn zero(space: &Arc<JetSpace>) -> Self {
        Self { space: space.clone(), coeffs: vec![C64::new(0.0, 0.0); space.len()] }
    }

    pub fn constant(space: &Arc<JetSpace>, c: C64) -> Self {
        let mut j = Self::zero(space);
        j.coeffs[0] = c;
        j
    }

    /// The coordinate function `x_k`.
    pub fn variable(space: &Arc<JetSpace>, k: usize) -> Self {
        let mut j = Self::zero(space);
        if space.order >= 1 {
            let idx = space.index[&MultiIndex::unit(space.nvars, k)];
            j.coeffs[idx] = C64::new(1.0, 0.0);
        }
        j
    }

    pub fn from_coeffs(space: &Arc<JetSpace>, coeffs: Vec<C64>) -> Self {
        assert_eq!(coeffs.len(), space.len());
        Self { space: space.clone(), coeffs }
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn constant_term(&self) -> C64 {
        self.coeffs[0]
    }

    /// Taylor coefficient of `x^m`; zero beyond the truncation order.
    pub fn coefficient(&self, m: &MultiIndex) -> C64 {
        self.space.position(m).map_or(C64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    /// Partial derivative `d^m f(0) = m! * coefficient(m)`.
    pub fn derivative(&self, m: &MultiIndex) -> C64 {
        self.coefficient(m) * m.factorial()
    }

    pub fn add(&self, other: &Jet) -> Jet {
        Jet {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        Jet {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: C64) -> Jet {
        Jet { space: self.space.clone(), coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn add_constant(&self, c: C64) -> Jet {
        let mut j = self.clone();
        j.coeffs[0] += c;
        j
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len()];
        for &(i, j, k) in &self.space.products {
            let a = self.coeffs[i];
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            out[k] += a * other.coeffs[j];
        }
        Jet { space: self.space.clone(), coeffs: out }
    }

    /// `sum_k c_k self^k` for a jet without constant term (Horner).
    pub fn compose_series(&self, c: &[C64]) -> Jet {
        debug_assert!(self.coeffs[0].norm() == 0.0);
        let mut acc = Jet::constant(&self.space, *c.last().unwrap_or(&C64::new(0.0, 0.0)));
        for ck in c.iter().rev().skip(1) {
            acc = acc.mul(self).add_constant(*ck);
        }
        acc
    }

    /// Principal `log` of the jet; the constant term must be non-zero.
    pub fn ln(&self) -> Jet {
        let c0 = self.coeffs[0];
        let mut h = self.scale(C64::new(1.0, 0.0) / c0);
        h.coeffs[0] = C64::new(0.0, 0.0);
        let order = self.space.order as usize;
        let series: Vec<C64> = (0..=order)
            .map(|k| {
                if k == 0 {
                    C64::new(0.0, 0.0)
                } else {
                    let s = if k % 2 == 1 { 1.0 } else { -1.0 };
                    C64::new(s / k as f64, 0.0)
                }
            })
            .collect();
        h.compose_series(&series).add_constant(c0.ln())
    }

    /// `(1 - h)^(-m)` for a jet `h` without constant term.
    pub fn inverse_power_series(h: &Jet, m: f64) -> Jet {
        let order = h.space.order as usize;
        let mut c = Vec::with_capacity(order + 1);
        let mut term = 1.0;
        for k in 0..=order {
            c.push(C64::new(term, 0.0));
            term *= (m + k as f64) / (k as f64 + 1.0);
        }
        h.compose_series(&c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_of_variables() {
        let s = JetSpace::new(2, 3);
        let x = Jet::variable(&s, 0);
        let y = Jet::variable(&s, 1);
        let p = x.add_constant(C64::new(1.0, 0.0)).mul(&y.add_constant(C64::new(2.0, 0.0)));
        assert_eq!(p.coefficient(&MultiIndex(vec![0, 0])), C64::new(2.0, 0.0));
        assert_eq!(p.coefficient(&MultiIndex(vec![1, 0])), C64::new(2.0, 0.0));
        assert_eq!(p.coefficient(&MultiIndex(vec![1, 1])), C64::new(1.0, 0.0));
    }

    #[test]
    fn log_of_geometric_series() {
        // log(1/(1 - x)) = sum x^k / k
        let s = JetSpace::new(1, 6);
        let x = Jet::variable(&s, 0);
        let g = Jet::inverse_power_series(&x, 1.0);
        let l = g.ln();
        for k in 1..=6u32 {
            let c = l.coefficient(&MultiIndex(vec![k]));
            assert!((c - C64::new(1.0 / k as f64, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn binomial_series() {
        // (1 - x)^(-3) coefficients are binom(k + 2, 2)
        let s = JetSpace::new(1, 5);
        let x = Jet::variable(&s, 0);
        let g = Jet::inverse_power_series(&x, 3.0);
        for k in 0..=5u32 {
            let want = ((k + 1) * (k + 2) / 2) as f64;
            assert!((g.coefficient(&MultiIndex(vec![k])).re - want).abs() < 1e-12);
        }
    }
}
