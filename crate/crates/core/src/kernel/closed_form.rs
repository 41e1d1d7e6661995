use super::BergmanKernel;
use crate::error::{Error, Result};
use crate::geometry::{factorial, ComplexPoint, MultiIndex};
use crate::jet::{Jet, JetSpace};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

const POLE_TOL: f64 = 1e-14;

/// Exact kernels of the unit ball and of polydiscs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClosedFormKernel {
    /// `n!/pi^n (1 - <z,w>)^{-(n+1)}`
    UnitBall { n: usize },
    /// Product of disc kernels `r^2 / (pi (r^2 - z conj w)^2)`.
    Polydisc { radii: Vec<f64> },
}

impl ClosedFormKernel {
    pub fn ball(n: usize) -> Self {
        ClosedFormKernel::UnitBall { n }
    }

    pub fn polydisc(radii: Vec<f64>) -> Self {
        ClosedFormKernel::Polydisc { radii }
    }

    fn check(&self, z: &ComplexPoint, w: &ComplexPoint) -> Result<()> {
        z.check_dim(self.dim())?;
        w.check_dim(self.dim())
    }
}

/// `(1 - s)^{-m}` as a jet where `s = s0 + ds` and `ds` has no constant term.
fn inverse_power(s0: C64, ds: &Jet, m: f64) -> Result<Jet> {
    let base = C64::new(1.0, 0.0) - s0;
    if base.norm() < POLE_TOL {
        return Err(Error::KernelPole);
    }
    let h = ds.scale(C64::new(1.0, 0.0) / base);
    Ok(Jet::inverse_power_series(&h, m).scale(base.powf(-m)))
}

impl BergmanKernel for ClosedFormKernel {
    fn dim(&self) -> usize {
        match self {
            ClosedFormKernel::UnitBall { n } => *n,
            ClosedFormKernel::Polydisc { radii } => radii.len(),
        }
    }

    fn eval(&self, z: &ComplexPoint, w: &ComplexPoint) -> Result<C64> {
        self.check(z, w)?;
        match self {
            ClosedFormKernel::UnitBall { n } => {
                let base = C64::new(1.0, 0.0) - z.inner(w);
                if base.norm() < POLE_TOL {
                    return Err(Error::KernelPole);
                }
                let c = factorial(*n as u32) / PI.powi(*n as i32);
                Ok(base.powi(-(*n as i32 + 1)) * c)
            }
            ClosedFormKernel::Polydisc { radii } => {
                let mut k = C64::new(1.0, 0.0);
                for (i, r) in radii.iter().enumerate() {
                    let r2 = r * r;
                    let base = C64::new(r2, 0.0) - z[i] * w[i].conj();
                    if base.norm() < POLE_TOL * r2 {
                        return Err(Error::KernelPole);
                    }
                    k *= r2 / (PI * base * base);
                }
                Ok(k)
            }
        }
    }

    fn mixed_derivative(&self, a: &MultiIndex, b: &MultiIndex, z: &ComplexPoint, w: &ComplexPoint) -> Result<C64> {
        let n = self.dim();
        a.check_dim(n)?;
        b.check_dim(n)?;
        let space = JetSpace::new(2 * n, a.degree() + b.degree());
        let jet = self.taylor_jet(z, w, &space)?;
        let mut full = a.0.clone();
        full.extend_from_slice(&b.0);
        Ok(jet.derivative(&MultiIndex(full)))
    }

    fn taylor_jet(&self, z: &ComplexPoint, w: &ComplexPoint, space: &Arc<JetSpace>) -> Result<Jet> {
        self.check(z, w)?;
        let n = self.dim();
        assert_eq!(space.nvars(), 2 * n, "jet space must have 2n variables");
        let wb: Vec<C64> = w.coords().iter().map(|x| x.conj()).collect();
        // (z_i + u_i)(conj w_i + v_i) - z_i conj w_i
        let delta = |i: usize| {
            let u = Jet::variable(space, i);
            let v = Jet::variable(space, n + i);
            u.scale(wb[i]).add(&v.scale(z[i])).add(&u.mul(&v))
        };
        match self {
            ClosedFormKernel::UnitBall { n } => {
                let mut ds = Jet::zero(space);
                for i in 0..*n {
                    ds = ds.add(&delta(i));
                }
                let s0: C64 = (0..*n).map(|i| z[i] * wb[i]).sum();
                let c = factorial(*n as u32) / PI.powi(*n as i32);
                Ok(inverse_power(s0, &ds, (*n + 1) as f64)?.scale(C64::new(c, 0.0)))
            }
            ClosedFormKernel::Polydisc { radii } => {
                let mut k = Jet::constant(space, C64::new(1.0, 0.0));
                for (i, r) in radii.iter().enumerate() {
                    let r2 = r * r;
                    let s0 = z[i] * wb[i] / r2;
                    let ds = delta(i).scale(C64::new(1.0 / r2, 0.0));
                    let f = inverse_power(s0, &ds, 2.0)?.scale(C64::new(1.0 / (PI * r2), 0.0));
                    k = k.mul(&f);
                }
                Ok(k)
            }
        }
    }
}
