use crate::curvature::sectional_curvature;
use crate::error::{Error, Result};
use crate::geometry::rigid::{unitarity_defect, UNITARY_TOL};
use crate::geometry::ComplexPoint;
use crate::kernel::BergmanKernel;
use crate::C64;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// `phi(z) = U (M z - a) / (1 - <z, a>)` with `M = P_a + s_a Q_a`,
/// `P_a` the projection onto `a`, `Q_a = I - P_a` and `s_a = sqrt(1 - |a|^2)`.
/// In one variable this is `(z - a)/(1 - conj(a) z)`; it sends `a` to 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallAutomorphism {
    pub a: ComplexPoint,
    #[serde(with = "crate::serde_complex::matrix")]
    pub u: DMatrix<C64>,
    #[serde(skip)]
    m: Option<DMatrix<C64>>,
}

impl BallAutomorphism {
    pub fn new(a: ComplexPoint, u: DMatrix<C64>) -> Result<Self> {
        let n = a.dim();
        if u.nrows() != n || u.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: u.nrows() });
        }
        if !(a.norm() < 1.0) {
            return Err(Error::OutsideDomain { rho: a.norm_sqr() - 1.0 });
        }
        let d = unitarity_defect(&u);
        if d > UNITARY_TOL {
            return Err(Error::NotUnitary(d));
        }
        let s = (1.0 - a.norm_sqr()).sqrt();
        let r2 = a.norm_sqr();
        let m = DMatrix::from_fn(n, n, |i, j| {
            let p = if r2 > 0.0 { a[i] * a[j].conj() / r2 } else { C64::new(0.0, 0.0) };
            let id = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            p + (id - p) * s
        });
        Ok(Self { a, u, m: Some(m) })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(ComplexPoint::zeros(n), DMatrix::identity(n, n)).expect("identity")
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    fn m(&self) -> DMatrix<C64> {
        match &self.m {
            Some(m) => m.clone(),
            None => Self::new(self.a.clone(), self.u.clone()).expect("validated").m.expect("set"),
        }
    }

    fn denominator(&self, z: &ComplexPoint) -> Result<C64> {
        z.check_dim(self.dim())?;
        let d = C64::new(1.0, 0.0) - z.inner(&self.a);
        if d.norm() < 1e-15 {
            return Err(Error::KernelPole);
        }
        Ok(d)
    }

    pub fn apply(&self, z: &ComplexPoint) -> Result<ComplexPoint> {
        let d = self.denominator(z)?;
        let num = self.m() * DVector::from_column_slice(z.coords()) - DVector::from_column_slice(self.a.coords());
        Ok(ComplexPoint((&self.u * num / d).iter().copied().collect()))
    }

    /// Complex Jacobian `U (M / D + N conj(a)^T / D^2)` with `N = M z - a`,
    /// `D = 1 - <z, a>`.
    pub fn differential(&self, z: &ComplexPoint) -> Result<DMatrix<C64>> {
        let d = self.denominator(z)?;
        let m = self.m();
        let num = &m * DVector::from_column_slice(z.coords()) - DVector::from_column_slice(self.a.coords());
        let abar = DVector::from_iterator(self.dim(), self.a.coords().iter().map(|c| c.conj()));
        Ok(&self.u * (m / d + num * abar.transpose() / (d * d)))
    }

    pub fn push_forward(&self, z: &ComplexPoint, xi: &ComplexPoint) -> Result<ComplexPoint> {
        let j = self.differential(z)?;
        Ok(ComplexPoint((j * DVector::from_column_slice(xi.coords())).iter().copied().collect()))
    }
}

/// `|S(phi(p); dphi_p xi) - S(p; xi)|`
pub fn curvature_invariance_check(
    kernel: &dyn BergmanKernel,
    phi: &BallAutomorphism,
    p: &ComplexPoint,
    xi: &ComplexPoint,
) -> Result<f64> {
    let before = sectional_curvature(kernel, p, xi)?.s;
    let after = sectional_curvature(kernel, &phi.apply(p)?, &phi.push_forward(p, xi)?)?.s;
    Ok((after - before).abs())
}
