//! Truncated and closed-form Bergman kernels.

mod basis;
mod closed_form;
mod gram;
mod model;

pub use basis::BasisSpec;
pub use closed_form::ClosedFormKernel;
pub use gram::{gram_matrix, gram_matrix_centered, GRAM_DIAGONAL_TOL};
pub use model::{build_kernel_model, KernelArtifact, KernelModel};

use crate::error::{Error, Result};
use crate::geometry::{ComplexPoint, MultiIndex};
use crate::jet::{Jet, JetSpace};
use crate::C64;
use std::sync::Arc;

/// A reproducing kernel `K(z, w)`, holomorphic in `z` and anti-holomorphic
/// in `w`.
pub trait BergmanKernel: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, z: &ComplexPoint, w: &ComplexPoint) -> Result<C64>;

    /// `d_z^a d_{conj w}^b K(z, w)`.
    fn mixed_derivative(&self, a: &MultiIndex, b: &MultiIndex, z: &ComplexPoint, w: &ComplexPoint) -> Result<C64>;

    /// Taylor jet of `(u, v) -> K(z + u, w + conj(v))` in the `2n` variables
    /// `(u, v)`: the coefficient of `u^a v^b` is the mixed derivative over
    /// `a! b!`.
    fn taylor_jet(&self, z: &ComplexPoint, w: &ComplexPoint, space: &Arc<JetSpace>) -> Result<Jet> {
        let n = self.dim();
        let coeffs = space
            .monomials()
            .iter()
            .map(|m| {
                let (a, b) = split_index(m, n);
                Ok(self.mixed_derivative(&a, &b, z, w)? / (a.factorial() * b.factorial()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Jet::from_coeffs(space, coeffs))
    }
}

/// Splits a `2n`-variable exponent into its `z` and `conj w` halves.
pub fn split_index(m: &MultiIndex, n: usize) -> (MultiIndex, MultiIndex) {
    (MultiIndex(m.0[..n].to_vec()), MultiIndex(m.0[n..].to_vec()))
}

/// `sup |K_A(z,w) - K_B(z,w)|` over the given pairs.
pub fn ramadanov_gap(
    a: &dyn BergmanKernel,
    b: &dyn BergmanKernel,
    pairs: &[(ComplexPoint, ComplexPoint)],
) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("compact set"));
    }
    let gaps = crate::parallel::map_slice(pairs, |(z, w)| -> Result<f64> { Ok((a.eval(z, w)? - b.eval(z, w)?).norm()) });
    let mut sup = 0.0f64;
    for g in gaps {
        sup = sup.max(g?);
    }
    Ok(sup)
}
