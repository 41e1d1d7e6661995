//! Bergman metric, curvature tensor and holomorphic sectional curvature.
//!
//! Everything is read off the Taylor jet of `log K(p + u, p + conj v)` in
//! the `2n` variables `(u, v)`: the coefficient of `u^a v^b` times `a! b!`
//! is `d_z^a d_{conj z}^b log K` at `p`.

mod scan;

pub use scan::{klembeck_scan, normal_and_tangent, resolve_ladder, ScanRow, ScanSchedule};

use crate::error::{Error, Result};
use crate::geometry::{ComplexPoint, MultiIndex};
use crate::jet::{Jet, JetSpace};
use crate::kernel::{BergmanKernel, ClosedFormKernel};
use crate::linalg::{hermitian_eigenvalues, hermitian_pd_inverse, PIVOT_THRESHOLD};
use crate::C64;
use nalgebra::DMatrix;
use serde::Serialize;
use std::sync::Arc;

/// Scalar in front of `R(xi, xi, xi, xi) / g(xi, xi)^2`, chosen so that the
/// disc has constant curvature `-2` and the ball `B^n` has `-4/(n+1)`.
pub const CURVATURE_NORMALIZATION: f64 = 2.0;

/// Mixed Wirtinger derivatives of `log K(z, z)` at a point up to total order 4.
#[derive(Debug, Clone)]
pub struct LogKernelJet {
    n: usize,
    jet: Jet,
}

impl LogKernelJet {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// `d_z^a d_{conj z}^b log K` at the expansion point.
    pub fn derivative(&self, a: &MultiIndex, b: &MultiIndex) -> C64 {
        let mut m = a.0.clone();
        m.extend_from_slice(&b.0);
        self.jet.derivative(&MultiIndex(m))
    }

    /// Same as [`derivative`](Self::derivative) with the indices given as
    /// lists of coordinates, e.g. `(&[i, k], &[j])` for `d_i d_k d_{conj j}`.
    pub fn by_coords(&self, zs: &[usize], zbars: &[usize]) -> C64 {
        let mut m = vec![0u32; 2 * self.n];
        for &i in zs {
            m[i] += 1;
        }
        for &j in zbars {
            m[self.n + j] += 1;
        }
        self.jet.derivative(&MultiIndex(m))
    }
}

/// Derivatives of `log K(z, z)` at `p` up to total order `order`.
pub fn log_kernel_derivatives_to(kernel: &dyn BergmanKernel, p: &ComplexPoint, order: u32) -> Result<LogKernelJet> {
    let n = kernel.dim();
    p.check_dim(n)?;
    let space = JetSpace::new(2 * n, order);
    let k = kernel.taylor_jet(p, p, &space)?;
    let k0 = k.constant_term();
    if !(k0.re > 0.0) || !k0.re.is_finite() {
        return Err(Error::NonPositiveKernel { value: k0.re });
    }
    Ok(LogKernelJet { n, jet: k.ln() })
}

pub fn log_kernel_derivatives(kernel: &dyn BergmanKernel, p: &ComplexPoint) -> Result<LogKernelJet> {
    log_kernel_derivatives_to(kernel, p, 4)
}

/// Metric `g[(i,j)] = g_{i conj j}` and its derivatives at a point.
#[derive(Debug, Clone)]
pub struct MetricAtPoint {
    pub p: ComplexPoint,
    pub g: DMatrix<C64>,
    /// `g_inv[(q,p)] = g^{p conj q}`, i.e. the matrix inverse of `g`.
    pub g_inv: DMatrix<C64>,
    /// `dg[k][(i,j)] = d_k g_{i conj j}`
    pub dg: Vec<DMatrix<C64>>,
    /// `dbar_g[l][(i,j)] = d_{conj l} g_{i conj j}`
    pub dbar_g: Vec<DMatrix<C64>>,
    /// `ddg[k][l][(i,j)] = d_k d_{conj l} g_{i conj j}`
    pub ddg: Vec<Vec<DMatrix<C64>>>,
}

impl MetricAtPoint {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// `g(xi, conj xi) = sum g_{i conj j} xi_i conj(xi_j)`
    pub fn norm_sqr(&self, xi: &ComplexPoint) -> C64 {
        let n = self.dim();
        let mut s = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                s += self.g[(i, j)] * xi[i] * xi[j].conj();
            }
        }
        s
    }

    /// `R_{i conj j k conj l} = -d_k d_{conj l} g_{i conj j}
    ///   + sum g^{p conj q} (d_k g_{i conj q}) (d_{conj l} g_{p conj j})`,
    /// flattened as `[((i * n + j) * n + k) * n + l]`.
    pub fn curvature_tensor(&self) -> Vec<C64> {
        let n = self.dim();
        let mut r = vec![C64::new(0.0, 0.0); n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut v = -self.ddg[k][l][(i, j)];
                        for p in 0..n {
                            for q in 0..n {
                                v += self.g_inv[(q, p)] * self.dg[k][(i, q)] * self.dbar_g[l][(p, j)];
                            }
                        }
                        r[((i * n + j) * n + k) * n + l] = v;
                    }
                }
            }
        }
        r
    }

    /// `R(xi, conj xi, xi, conj xi)` contracted directly, without forming
    /// the full tensor.
    pub fn curvature_along(&self, xi: &ComplexPoint) -> C64 {
        let n = self.dim();
        let mut first = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        first += self.ddg[k][l][(i, j)] * xi[i] * xi[j].conj() * xi[k] * xi[l].conj();
                    }
                }
            }
        }
        // a_q = sum_{i,k} d_k g_{i conj q} xi_i xi_k, b_p = sum_{j,l} d_{conj l} g_{p conj j} conj(xi_j xi_l)
        let a: Vec<C64> = (0..n)
            .map(|q| {
                let mut s = C64::new(0.0, 0.0);
                for i in 0..n {
                    for k in 0..n {
                        s += self.dg[k][(i, q)] * xi[i] * xi[k];
                    }
                }
                s
            })
            .collect();
        let b: Vec<C64> = (0..n)
            .map(|p| {
                let mut s = C64::new(0.0, 0.0);
                for j in 0..n {
                    for l in 0..n {
                        s += self.dbar_g[l][(p, j)] * (xi[j] * xi[l]).conj();
                    }
                }
                s
            })
            .collect();
        let mut second = C64::new(0.0, 0.0);
        for p in 0..n {
            for q in 0..n {
                second += self.g_inv[(q, p)] * a[q] * b[p];
            }
        }
        second - first
    }
}

pub fn metric_from_log_jet(p: &ComplexPoint, l: &LogKernelJet) -> Result<MetricAtPoint> {
    let n = l.dim();
    let mat = |f: &dyn Fn(usize, usize) -> C64| DMatrix::from_fn(n, n, |i, j| f(i, j));
    let g = mat(&|i, j| l.by_coords(&[i], &[j]));
    let min_eigenvalue = hermitian_eigenvalues(&g).first().copied().unwrap_or(0.0);
    if !(min_eigenvalue > 0.0) {
        return Err(Error::DegenerateMetric { min_eigenvalue });
    }
    let g_inv = hermitian_pd_inverse(&g, PIVOT_THRESHOLD)?;
    let dg = (0..n).map(|k| mat(&|i, j| l.by_coords(&[i, k], &[j]))).collect();
    let dbar_g = (0..n).map(|m| mat(&|i, j| l.by_coords(&[i], &[j, m]))).collect();
    let ddg = (0..n)
        .map(|k| (0..n).map(|m| mat(&|i, j| l.by_coords(&[i, k], &[j, m]))).collect())
        .collect();
    Ok(MetricAtPoint { p: p.clone(), g, g_inv, dg, dbar_g, ddg })
}

pub fn metric_tensor(kernel: &dyn BergmanKernel, p: &ComplexPoint) -> Result<MetricAtPoint> {
    metric_from_log_jet(p, &log_kernel_derivatives(kernel, p)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureSample {
    pub p: ComplexPoint,
    /// Unit direction.
    pub xi: ComplexPoint,
    pub s: f64,
    /// `|Im R| / g^2`; zero up to rounding for an exact kernel.
    pub imag_residue: f64,
    /// Boundary distance of `p` when known.
    pub dist: Option<f64>,
}

/// Holomorphic sectional curvature from a precomputed metric.
pub fn sectional_from_metric(metric: &MetricAtPoint, xi: &ComplexPoint) -> Result<CurvatureSample> {
    xi.check_dim(metric.dim())?;
    let unit = xi.normalized().ok_or(Error::ZeroDirection)?;
    let r = metric.curvature_along(&unit);
    let g = metric.norm_sqr(&unit).re;
    Ok(CurvatureSample {
        p: metric.p.clone(),
        xi: unit,
        s: CURVATURE_NORMALIZATION * r.re / (g * g),
        imag_residue: r.im.abs() / (g * g),
        dist: None,
    })
}

pub fn sectional_curvature(kernel: &dyn BergmanKernel, p: &ComplexPoint, xi: &ComplexPoint) -> Result<CurvatureSample> {
    if xi.norm() == 0.0 {
        return Err(Error::ZeroDirection);
    }
    sectional_from_metric(&metric_tensor(kernel, p)?, xi)
}

/// Re-derives the normalization constant from the closed-form disc and ball
/// kernels: the raw ratio on the disc fixes the constant, which must then
/// reproduce `-4/(n+1)` on `B^2` and `B^3`. The result is snapped to 1 or 2.
pub fn calibrate_normalization() -> Result<f64> {
    let raw = |n: usize, p: ComplexPoint, xi: ComplexPoint| -> Result<f64> {
        let m = metric_tensor(&ClosedFormKernel::ball(n), &p)?;
        let unit = xi.normalized().ok_or(Error::ZeroDirection)?;
        let g = m.norm_sqr(&unit).re;
        Ok(m.curvature_along(&unit).re / (g * g))
    };
    let disc = raw(1, ComplexPoint::zeros(1), ComplexPoint::basis(1, 0))?;
    let c = -2.0 / disc;
    let snapped = if (c - 1.0).abs() < 1e-9 {
        1.0
    } else if (c - 2.0).abs() < 1e-9 {
        2.0
    } else {
        return Err(Error::NonConvergence(format!("curvature normalization {c} is neither 1 nor 2")));
    };
    for n in [2usize, 3] {
        let p = ComplexPoint::new((0..n).map(|i| C64::new(0.1 * (i + 1) as f64, -0.05)).collect());
        let xi = ComplexPoint::new((0..n).map(|i| C64::new(1.0, 0.3 * i as f64)).collect());
        let s = snapped * raw(n, p, xi)?;
        let want = -4.0 / (n as f64 + 1.0);
        if (s - want).abs() > 1e-9 {
            return Err(Error::NonConvergence(format!("normalization {snapped} gives {s} on B^{n}, expected {want}")));
        }
    }
    Ok(snapped)
}

/// `(2 - S_loc) / (2 - S_full) - 1` at `p` in direction `xi`.
pub fn localization_ratio(
    kernel_full: &dyn BergmanKernel,
    kernel_localized: &dyn BergmanKernel,
    p: &ComplexPoint,
    xi: &ComplexPoint,
) -> Result<f64> {
    let full = sectional_curvature(kernel_full, p, xi)?.s;
    let local = sectional_curvature(kernel_localized, p, xi)?.s;
    let den = 2.0 - full;
    if den.abs() < 1e-8 {
        return Err(Error::SingularRatio(den));
    }
    Ok((2.0 - local) / den - 1.0)
}

/// Shared jet space for repeated curvature evaluations in `n` dimensions.
pub fn curvature_space(n: usize) -> Arc<JetSpace> {
    JetSpace::new(2 * n, 4)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calibration_is_two() {
        assert_eq!(calibrate_normalization().unwrap(), CURVATURE_NORMALIZATION);
    }

    #[test]
    fn disc_metric_at_center() {
        let k = ClosedFormKernel::ball(1);
        let m = metric_tensor(&k, &ComplexPoint::zeros(1)).unwrap();
        assert!((m.g[(0, 0)] - C64::new(2.0, 0.0)).norm() < 1e-12);
        let l = log_kernel_derivatives(&k, &ComplexPoint::zeros(1)).unwrap();
        assert!(l.by_coords(&[0], &[]).norm() < 1e-14);
    }

    #[test]
    fn ball_metric_at_center() {
        let m = metric_tensor(&ClosedFormKernel::ball(2), &ComplexPoint::zeros(2)).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 3.0 } else { 0.0 };
                assert!((m.g[(i, j)] - C64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn full_tensor_matches_contraction() {
        let m = metric_tensor(
            &ClosedFormKernel::polydisc(vec![1.0, 1.5]),
            &ComplexPoint::new(vec![C64::new(0.3, 0.2), C64::new(-0.4, 0.1)]),
        )
        .unwrap();
        let xi = ComplexPoint::new(vec![C64::new(0.7, -0.2), C64::new(0.1, 0.5)]);
        let r = m.curvature_tensor();
        let mut want = C64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        want += r[((i * 2 + j) * 2 + k) * 2 + l] * xi[i] * xi[j].conj() * xi[k] * xi[l].conj();
                    }
                }
            }
        }
        assert!((m.curvature_along(&xi) - want).norm() < 1e-10);
    }

    #[test]
    fn ball_constant_off_center() {
        let k = ClosedFormKernel::ball(2);
        let p = ComplexPoint::new(vec![C64::new(0.5, 0.0), C64::new(0.2, 0.0)]);
        let xi = ComplexPoint::new(vec![C64::new(0.3, -0.8), C64::new(1.1, 0.4)]);
        let s = sectional_curvature(&k, &p, &xi).unwrap();
        assert!((s.s + 4.0 / 3.0).abs() < 1e-9);
        assert!(s.imag_residue < 1e-10);
        let s2 = sectional_curvature(&k, &p, &xi.scale(C64::new(0.0, 17.0))).unwrap();
        assert!((s.s - s2.s).abs() < 1e-10);
    }
}
