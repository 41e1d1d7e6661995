use super::ScalingChain;
use crate::error::{Error, Result};
use crate::geometry::{ComplexPoint, MultiIndex};
use crate::kernel::BergmanKernel;
use crate::C64;
use std::sync::Arc;

/// Kernel of `sigma(Omega)` obtained from the kernel of `Omega` by the
/// transformation rule
/// `K_{sigma(Omega)}(x, y) = K_Omega(z, w) / (det J(z) conj(det J(w)))`
/// with `z = sigma^{-1}(x)`, `w = sigma^{-1}(y)`. Only values are available.
pub struct TransportedKernel {
    base: Arc<dyn BergmanKernel>,
    chain: ScalingChain,
}

impl TransportedKernel {
    pub fn new(base: Arc<dyn BergmanKernel>, chain: ScalingChain) -> Result<Self> {
        crate::error::check_dim(base.dim(), chain.dim())?;
        Ok(Self { base, chain })
    }

    pub fn chain(&self) -> &ScalingChain {
        &self.chain
    }
}

impl BergmanKernel for TransportedKernel {
    fn dim(&self) -> usize {
        self.chain.dim()
    }

    fn eval(&self, x: &ComplexPoint, y: &ComplexPoint) -> Result<C64> {
        let z = self.chain.inverse(x)?;
        let w = self.chain.inverse(y)?;
        let jz = self.chain.jacobian_determinant(&z);
        let jw = self.chain.jacobian_determinant(&w);
        Ok(self.base.eval(&z, &w)? / (jz * jw.conj()))
    }

    fn mixed_derivative(&self, a: &MultiIndex, b: &MultiIndex, z: &ComplexPoint, w: &ComplexPoint) -> Result<C64> {
        if a.degree() + b.degree() == 0 {
            return self.eval(z, w);
        }
        Err(Error::InvalidPlan("transported kernels provide values only".into()))
    }
}
