use crate::error::{Error, Result};
use crate::geometry::{ComplexPoint, DefiningJet};
use crate::C64;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Scale of the normal coordinate after the shear: `rho = -(g/KAPPA) Re w_1 + ...`.
pub const KAPPA: f64 = 2.0;

/// Quadratic change of coordinates removing the pure second-order
/// holomorphic terms of a frame-normalized defining function:
/// `w_1 = KAPPA (x_1 - Q(x)/g)`, `w' = A x'` with
/// `Q(x) = sum_ij d^2 rho/dx_i dx_j x_i x_j`, `g = |grad rho(0)|` and `A`
/// normalizing the tangential Levi form to the identity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadraticShear {
    pub gradient_norm: f64,
    #[serde(with = "crate::serde_complex::matrix")]
    pub quad: DMatrix<C64>,
    /// Upper-triangular tangential normalization, `(n-1)` square.
    #[serde(with = "crate::serde_complex::matrix")]
    pub tangential: DMatrix<C64>,
    #[serde(with = "crate::serde_complex::matrix")]
    tangential_inv: DMatrix<C64>,
}

const NEWTON_ITER: usize = 100;

impl QuadraticShear {
    /// Builds the shear from the jet of the defining function at the frame
    /// origin. The jet must have gradient along `-e_1`.
    pub fn from_jet(jet: &DefiningJet) -> Result<Self> {
        let n = jet.dz.len();
        let g = jet.gradient_norm();
        if !(g > 0.0) {
            return Err(Error::DegenerateGradient);
        }
        let quad = jet.dzdz.clone();
        if !quad.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::InvalidDomain("Hessian unavailable at the boundary point".into()));
        }
        let m = n - 1;
        let (tangential, tangential_inv) = if m == 0 {
            (DMatrix::zeros(0, 0), DMatrix::zeros(0, 0))
        } else {
            // A^H A = (KAPPA/g) M^T with M the tangential complex Hessian.
            let p = DMatrix::from_fn(m, m, |i, k| jet.dzdzbar[(k + 1, i + 1)] * (KAPPA / g));
            let p = (&p + p.adjoint()) * C64::new(0.5, 0.0);
            let chol = p.cholesky().ok_or_else(|| {
                Error::InvalidDomain("Levi form is not positive definite at the boundary point".into())
            })?;
            let a = chol.l().adjoint();
            let a_inv = a.clone().try_inverse().ok_or(Error::DegenerateMetric { min_eigenvalue: 0.0 })?;
            (a, a_inv)
        };
        Ok(Self { gradient_norm: g, quad, tangential, tangential_inv })
    }

    pub fn dim(&self) -> usize {
        self.quad.nrows()
    }

    fn q(&self, x: &[C64]) -> C64 {
        let n = x.len();
        let mut s = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                s += self.quad[(i, j)] * x[i] * x[j];
            }
        }
        s
    }

    pub fn apply(&self, x: &ComplexPoint) -> ComplexPoint {
        let n = self.dim();
        let mut w = Vec::with_capacity(n);
        w.push((x[0] - self.q(x.coords()) / self.gradient_norm) * KAPPA);
        for i in 1..n {
            let mut s = C64::new(0.0, 0.0);
            for k in 1..n {
                s += self.tangential[(i - 1, k - 1)] * x[k];
            }
            w.push(s);
        }
        ComplexPoint(w)
    }

    pub fn jacobian(&self, x: &ComplexPoint) -> DMatrix<C64> {
        let n = self.dim();
        let mut j = DMatrix::zeros(n, n);
        for c in 0..n {
            let mut dq = C64::new(0.0, 0.0);
            for i in 0..n {
                dq += (self.quad[(i, c)] + self.quad[(c, i)]) * x[i];
            }
            let delta = if c == 0 { 1.0 } else { 0.0 };
            j[(0, c)] = (C64::new(delta, 0.0) - dq / self.gradient_norm) * KAPPA;
        }
        for i in 1..n {
            for k in 1..n {
                j[(i, k)] = self.tangential[(i - 1, k - 1)];
            }
        }
        j
    }

    /// Inverse by exact tangential solve and damped Newton in `x_1`, started
    /// from the linearization.
    pub fn inverse(&self, w: &ComplexPoint) -> Result<ComplexPoint> {
        let n = self.dim();
        let mut x = vec![C64::new(0.0, 0.0); n];
        for i in 1..n {
            for k in 1..n {
                x[i] += self.tangential_inv[(i - 1, k - 1)] * w[k];
            }
        }
        x[0] = w[0] / KAPPA + self.q(&x) / self.gradient_norm;
        let f = |x: &[C64]| (x[0] - self.q(x) / self.gradient_norm) * KAPPA - w[0];
        let tol = 1e-14 * (1.0 + w[0].norm());
        let mut fx = f(&x);
        for _ in 0..NEWTON_ITER {
            if fx.norm() <= tol {
                return Ok(ComplexPoint(x));
            }
            let mut dq = C64::new(0.0, 0.0);
            for i in 0..n {
                dq += (self.quad[(i, 0)] + self.quad[(0, i)]) * x[i];
            }
            let df = (C64::new(1.0, 0.0) - dq / self.gradient_norm) * KAPPA;
            if df.norm() == 0.0 {
                break;
            }
            let step = fx / df;
            let mut t = 1.0;
            loop {
                let mut trial = x.clone();
                trial[0] -= step * t;
                let ft = f(&trial);
                if ft.norm() < fx.norm() || t < 1e-6 {
                    x = trial;
                    fx = ft;
                    break;
                }
                t *= 0.5;
            }
        }
        if fx.norm() <= 1e3 * tol {
            Ok(ComplexPoint(x))
        } else {
            Err(Error::NonConvergence(format!("shear inversion residual {:.3e}", fx.norm())))
        }
    }
}
