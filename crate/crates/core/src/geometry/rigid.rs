use crate::error::{Error, Result};
use crate::geometry::ComplexPoint;
use crate::C64;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Complex rigid motion `z -> U z + b` with `U` unitary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidMotion {
    #[serde(with = "crate::serde_complex::matrix")]
    pub unitary: DMatrix<C64>,
    pub translation: ComplexPoint,
}

pub const UNITARY_TOL: f64 = 1e-12;

impl RigidMotion {
    pub fn new(unitary: DMatrix<C64>, translation: ComplexPoint) -> Result<Self> {
        let n = translation.dim();
        if unitary.nrows() != n || unitary.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: unitary.nrows() });
        }
        let dev = unitarity_defect(&unitary);
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { unitary, translation })
    }

    pub fn identity(n: usize) -> Self {
        Self { unitary: DMatrix::identity(n, n), translation: ComplexPoint::zeros(n) }
    }

    pub fn translation_only(b: ComplexPoint) -> Self {
        let n = b.dim();
        Self { unitary: DMatrix::identity(n, n), translation: b }
    }

    pub fn dim(&self) -> usize {
        self.translation.dim()
    }

    pub fn apply(&self, z: &ComplexPoint) -> ComplexPoint {
        let v = &self.unitary * DVector::from_column_slice(z.coords());
        ComplexPoint(v.iter().zip(self.translation.coords()).map(|(a, b)| a + b).collect())
    }

    pub fn apply_inverse(&self, w: &ComplexPoint) -> ComplexPoint {
        let d = DVector::from_iterator(w.dim(), w.coords().iter().zip(self.translation.coords()).map(|(a, b)| a - b));
        ComplexPoint((self.unitary.adjoint() * d).iter().copied().collect())
    }

    /// Applies only the linear part.
    pub fn apply_linear(&self, v: &ComplexPoint) -> ComplexPoint {
        ComplexPoint((&self.unitary * DVector::from_column_slice(v.coords())).iter().copied().collect())
    }

    pub fn inverse(&self) -> RigidMotion {
        let u_adj = self.unitary.adjoint();
        let b = &u_adj * DVector::from_column_slice(self.translation.coords());
        RigidMotion {
            unitary: u_adj,
            translation: ComplexPoint(b.iter().map(|c| -c).collect()),
        }
    }
}

/// `max |U^H U - I|` entrywise.
pub fn unitarity_defect(u: &DMatrix<C64>) -> f64 {
    let n = u.ncols();
    let prod = u.adjoint() * u;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Unitary `U` with `U v = target_phase * e_1` for a unit vector `v`, built
/// from a complex Householder reflection followed by a phase on the first
/// row. The remaining rows form a deterministic orthonormal basis of the
/// complement of `v`.
pub fn householder_to_axis(v: &ComplexPoint, target: C64) -> Result<DMatrix<C64>> {
    let n = v.dim();
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::ZeroDirection);
    }
    let v = v.scale_real(1.0 / norm);
    let v1 = v[0];
    let phase = if v1.norm() > 0.0 { v1 / v1.norm() } else { C64::new(1.0, 0.0) };
    // H v = alpha e_1 with alpha = -phase avoids cancellation.
    let alpha = -phase;
    let mut w = v.0.clone();
    w[0] -= alpha;
    let wn: f64 = w.iter().map(|c| c.norm_sqr()).sum();
    let mut h = DMatrix::<C64>::identity(n, n);
    if wn > 1e-300 {
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] -= w[i] * w[j].conj() * (2.0 / wn);
            }
        }
    }
    // Row scaling so the image of v is `target`.
    let scale = target / alpha;
    for j in 0..n {
        h[(0, j)] *= scale;
    }
    Ok(h)
}

/// Orthonormal basis of the Hermitian complement of `v` (n-1 vectors).
pub fn orthonormal_complement(v: &ComplexPoint) -> Result<Vec<ComplexPoint>> {
    let u = householder_to_axis(v, C64::new(1.0, 0.0))?;
    // Rows 1.. of U are orthonormal and orthogonal to v; as vectors we need
    // conj(row) so that <row_vec, v> = 0 in the Hermitian sense.
    Ok((1..v.dim())
        .map(|i| ComplexPoint((0..v.dim()).map(|j| u[(i, j)].conj()).collect()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn householder_maps_vector_to_target() {
        let v = ComplexPoint::new(vec![C64::new(0.3, -0.4), C64::new(0.1, 0.7), C64::new(-0.2, 0.0)]);
        let v = v.normalized().unwrap();
        let u = householder_to_axis(&v, C64::new(-1.0, 0.0)).unwrap();
        assert!(unitarity_defect(&u) < 1e-14);
        let img = &u * DVector::from_column_slice(v.coords());
        assert!((img[0] + C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(img[1].norm() < 1e-14 && img[2].norm() < 1e-14);
    }

    #[test]
    fn complement_is_orthonormal() {
        let v = ComplexPoint::new(vec![C64::new(0.0, 1.0), C64::new(2.0, -1.0)]);
        let c = orthonormal_complement(&v).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c[0].inner(&v).norm() < 1e-14);
        assert!((c[0].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_round_trip() {
        let v = ComplexPoint::new(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        let u = householder_to_axis(&v, C64::new(-1.0, 0.0)).unwrap();
        let m = RigidMotion::new(u, ComplexPoint::real(&[0.5, -1.0])).unwrap();
        let z = ComplexPoint::new(vec![C64::new(0.1, 0.2), C64::new(-0.3, 0.4)]);
        let back = m.apply_inverse(&m.apply(&z));
        assert!(back.distance(&z) < 1e-15);
        let back2 = m.inverse().apply(&m.apply(&z));
        assert!(back2.distance(&z) < 1e-15);
    }
}
