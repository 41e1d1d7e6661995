//! Dense complex linear algebra: pivoted Hermitian Cholesky with a relative
//! pivot threshold, triangular inverses and Hermitian spectra.

use crate::error::{Error, Result};
use crate::C64;
use nalgebra::DMatrix;

/// Relative pivot threshold shared by the Gram factorization and the
/// metric inverse.
pub const PIVOT_THRESHOLD: f64 = 1e-10;

/// `A[p, p] = L L^H` restricted to the retained pivots `p`.
#[derive(Debug, Clone)]
pub struct PivotedCholesky {
    /// Retained indices in pivot order.
    pub retained: Vec<usize>,
    /// Indices whose Schur-complement pivot fell below the threshold.
    pub dropped: Vec<usize>,
    /// Lower-triangular factor, `retained.len()` square.
    pub factor: DMatrix<C64>,
}

/// Greedy diagonal pivoting; stops once the largest remaining pivot is below
/// `tau * max_i A[i][i]`.
pub fn pivoted_cholesky(a: &DMatrix<C64>, tau: f64) -> PivotedCholesky {
    let n = a.nrows();
    let mut w = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let max_diag = (0..n).map(|i| a[(i, i)].re).fold(0.0, f64::max);
    let floor = tau * max_diag;
    let mut l = DMatrix::<C64>::zeros(n, n);
    let mut r = 0;
    for k in 0..n {
        let (p, piv) = (k..n)
            .map(|j| (j, w[(j, j)].re))
            .fold((k, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best });
        if !(piv > floor) || piv <= 0.0 {
            break;
        }
        if p != k {
            w.swap_rows(k, p);
            w.swap_columns(k, p);
            l.swap_rows(k, p);
            perm.swap(k, p);
        }
        let d = w[(k, k)].re.sqrt();
        l[(k, k)] = C64::new(d, 0.0);
        for i in k + 1..n {
            l[(i, k)] = w[(i, k)] / d;
        }
        for j in k + 1..n {
            let ljk = l[(j, k)].conj();
            for i in j..n {
                let v = l[(i, k)] * ljk;
                w[(i, j)] -= v;
                if i != j {
                    w[(j, i)] = w[(i, j)].conj();
                }
            }
            w[(j, j)].im = 0.0;
        }
        r = k + 1;
    }
    PivotedCholesky {
        retained: perm[..r].to_vec(),
        dropped: perm[r..].to_vec(),
        factor: l.view((0, 0), (r, r)).into_owned(),
    }
}

/// Inverse of a lower-triangular matrix by forward substitution.
pub fn lower_triangular_inverse(l: &DMatrix<C64>) -> DMatrix<C64> {
    let n = l.nrows();
    let mut inv = DMatrix::<C64>::zeros(n, n);
    for j in 0..n {
        inv[(j, j)] = C64::new(1.0, 0.0) / l[(j, j)];
        for i in j + 1..n {
            let mut s = C64::new(0.0, 0.0);
            for k in j..i {
                s += l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -s / l[(i, i)];
        }
    }
    inv
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(a: &DMatrix<C64>) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let h = (a + a.adjoint()) * C64::new(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Inverse of a Hermitian positive definite matrix through the pivoted
/// factorization. Fails with the smallest eigenvalue when a pivot is dropped.
pub fn hermitian_pd_inverse(a: &DMatrix<C64>, tau: f64) -> Result<DMatrix<C64>> {
    let n = a.nrows();
    let chol = pivoted_cholesky(a, tau);
    if !chol.dropped.is_empty() {
        let min_eigenvalue = hermitian_eigenvalues(a).first().copied().unwrap_or(0.0);
        return Err(Error::DegenerateMetric { min_eigenvalue });
    }
    let linv = lower_triangular_inverse(&chol.factor);
    let inv_p = linv.adjoint() * &linv;
    let mut inv = DMatrix::<C64>::zeros(n, n);
    for (a_i, &pi) in chol.retained.iter().enumerate() {
        for (b_j, &pj) in chol.retained.iter().enumerate() {
            inv[(pi, pj)] = inv_p[(a_i, b_j)];
        }
    }
    Ok(inv)
}

/// Determinant of a general complex matrix.
pub fn determinant(a: &DMatrix<C64>) -> C64 {
    a.clone().lu().determinant()
}

/// Solves `a x = b` for a general complex matrix.
pub fn solve(a: &DMatrix<C64>, b: &[C64]) -> Option<Vec<C64>> {
    let rhs = nalgebra::DVector::from_column_slice(b);
    a.clone().lu().solve(&rhs).map(|x| x.iter().copied().collect())
}
