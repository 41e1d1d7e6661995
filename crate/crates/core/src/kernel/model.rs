use super::gram::{diagonalize, gram_matrix_centered};
use super::{split_index, BasisSpec, BergmanKernel};
use crate::error::{Error, Result};
use crate::geometry::domain::monomial_derivative;
use crate::geometry::{ComplexPoint, Domain, DomainSpec, MultiIndex, SamplePlan};
use crate::jet::{Jet, JetSpace};
use crate::linalg::{lower_triangular_inverse, pivoted_cholesky};
use crate::C64;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Finite-rank kernel `K_d(z,w) = sum_k phi_k(z) conj(phi_k(w))` where the
/// `phi_k = L^{-1} m_R` are the monomials orthonormalized through a pivoted
/// Cholesky factor of the Gram matrix.
#[derive(Debug, Clone)]
pub struct KernelModel {
    domain: DomainSpec,
    basis: BasisSpec,
    plan: SamplePlan,
    center: ComplexPoint,
    tau: f64,
    gram: DMatrix<C64>,
    retained: Vec<MultiIndex>,
    dropped: Vec<MultiIndex>,
    coeffs: DMatrix<C64>,
}

/// Audit-friendly JSON form of a model. The factorization is recomputed
/// from the stored Gram matrix on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelArtifact {
    pub domain: DomainSpec,
    pub basis: Vec<MultiIndex>,
    pub max_degree: u32,
    pub plan: SamplePlan,
    pub center: ComplexPoint,
    pub tau: f64,
    #[serde(with = "crate::serde_complex::matrix")]
    pub gram: DMatrix<C64>,
    pub dropped_modes: Vec<MultiIndex>,
}

/// Builds the model with relative pivot threshold `tau`. Reinhardt domains
/// get a diagonal Gram matrix; under product quadrature the off-diagonal
/// entries are first checked to vanish.
pub fn build_kernel_model(domain: &Domain, basis: &BasisSpec, plan: &SamplePlan, tau: f64) -> Result<KernelModel> {
    let center = domain.basis_center();
    let mut g = gram_matrix_centered(domain, basis, plan, &center)?;
    if domain.is_reinhardt() {
        g = diagonalize(&g, matches!(plan, SamplePlan::Product { .. }))?;
    }
    KernelModel::from_gram(domain.spec().clone(), basis.clone(), plan.clone(), center, tau, g)
}

impl KernelModel {
    pub fn from_gram(
        domain: DomainSpec,
        basis: BasisSpec,
        plan: SamplePlan,
        center: ComplexPoint,
        tau: f64,
        gram: DMatrix<C64>,
    ) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::InvalidPlan(format!("pivot threshold must be positive, got {tau}")));
        }
        if gram.nrows() != basis.len() || gram.ncols() != basis.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), got: gram.nrows() });
        }
        let chol = pivoted_cholesky(&gram, tau);
        if chol.retained.is_empty() {
            return Err(Error::AllModesDropped);
        }
        let coeffs = lower_triangular_inverse(&chol.factor);
        let retained = chol.retained.iter().map(|&i| basis.indices[i].clone()).collect();
        let mut dropped_idx = chol.dropped.clone();
        dropped_idx.sort_unstable();
        let dropped = dropped_idx.iter().map(|&i| basis.indices[i].clone()).collect();
        Ok(Self { domain, basis, plan, center, tau, gram, retained, dropped, coeffs })
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn plan(&self) -> &SamplePlan {
        &self.plan
    }

    pub fn center(&self) -> &ComplexPoint {
        &self.center
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn gram(&self) -> &DMatrix<C64> {
        &self.gram
    }

    pub fn dropped_modes(&self) -> &[MultiIndex] {
        &self.dropped
    }

    pub fn rank(&self) -> usize {
        self.retained.len()
    }

    /// `d^a phi_k(z) / a!` for every orthonormal function.
    fn scaled_derivatives(&self, a: &MultiIndex, z: &ComplexPoint) -> DVector<C64> {
        let x = z - &self.center;
        let t = DVector::from_iterator(
            self.retained.len(),
            self.retained.iter().map(|b| monomial_derivative(b, a, x.coords())),
        );
        (&self.coeffs * t) / C64::new(a.factorial(), 0.0)
    }

    pub fn to_artifact(&self) -> KernelArtifact {
        KernelArtifact {
            domain: self.domain.clone(),
            basis: self.basis.indices.clone(),
            max_degree: self.basis.max_degree,
            plan: self.plan.clone(),
            center: self.center.clone(),
            tau: self.tau,
            gram: self.gram.clone(),
            dropped_modes: self.dropped.clone(),
        }
    }

    pub fn from_artifact(a: KernelArtifact) -> Result<Self> {
        let basis = BasisSpec::new(a.domain.dim(), a.max_degree);
        if basis.indices != a.basis {
            return Err(Error::InvalidPlan("artifact basis is not the graded basis of its degree".into()));
        }
        Self::from_gram(a.domain, basis, a.plan, a.center, a.tau, a.gram)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_artifact())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_artifact(serde_json::from_str(s)?)
    }
}

impl BergmanKernel for KernelModel {
    fn dim(&self) -> usize {
        self.basis.n
    }

    fn eval(&self, z: &ComplexPoint, w: &ComplexPoint) -> Result<C64> {
        let zero = MultiIndex::zero(self.dim());
        self.mixed_derivative(&zero, &zero, z, w)
    }

    fn mixed_derivative(&self, a: &MultiIndex, b: &MultiIndex, z: &ComplexPoint, w: &ComplexPoint) -> Result<C64> {
        let n = self.dim();
        z.check_dim(n)?;
        w.check_dim(n)?;
        a.check_dim(n)?;
        b.check_dim(n)?;
        let pa = self.scaled_derivatives(a, z) * C64::new(a.factorial(), 0.0);
        let pb = self.scaled_derivatives(b, w) * C64::new(b.factorial(), 0.0);
        Ok(pa.iter().zip(pb.iter()).map(|(x, y)| x * y.conj()).sum())
    }

    fn taylor_jet(&self, z: &ComplexPoint, w: &ComplexPoint, space: &Arc<JetSpace>) -> Result<Jet> {
        let n = self.dim();
        z.check_dim(n)?;
        w.check_dim(n)?;
        let halves = MultiIndex::graded(n, space.order());
        let pz: Vec<DVector<C64>> = halves.iter().map(|a| self.scaled_derivatives(a, z)).collect();
        let pw: Vec<DVector<C64>> = halves.iter().map(|b| self.scaled_derivatives(b, w)).collect();
        let pos = |m: &MultiIndex| halves.iter().position(|x| x == m).expect("graded index");
        let coeffs = space
            .monomials()
            .iter()
            .map(|m| {
                let (a, b) = split_index(m, n);
                let (x, y) = (&pz[pos(&a)], &pw[pos(&b)]);
                x.iter().zip(y.iter()).map(|(p, q)| p * q.conj()).sum()
            })
            .collect();
        Ok(Jet::from_coeffs(space, coeffs))
    }
}
