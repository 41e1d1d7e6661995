use crate::error::{Error, Result};
use crate::geometry::rigid::{unitarity_defect, UNITARY_TOL};
use crate::geometry::{ComplexPoint, Domain};
use crate::C64;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Largest group the closure iteration will build.
pub const MAX_GROUP_ORDER: usize = 10_000;

const MATCH_TOL: f64 = 1e-12;

/// Generator list as declared in experiment files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    #[serde(default)]
    pub labels: Vec<String>,
    pub generators: Vec<MatrixSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixSpec(#[serde(with = "crate::serde_complex::matrix")] pub DMatrix<C64>);

/// A finite group of unitary matrices, stored as the full element list with
/// the identity first.
#[derive(Debug, Clone)]
pub struct FiniteUnitaryGroup {
    n: usize,
    labels: Vec<String>,
    generators: Vec<DMatrix<C64>>,
    elements: Vec<DMatrix<C64>>,
}

fn same(a: &DMatrix<C64>, b: &DMatrix<C64>) -> bool {
    a.iter().zip(b.iter()).all(|(x, y)| (x - y).norm() <= MATCH_TOL)
}

impl FiniteUnitaryGroup {
    /// Closure of the generators under multiplication.
    pub fn from_generators(n: usize, generators: Vec<DMatrix<C64>>, labels: Vec<String>) -> Result<Self> {
        for g in &generators {
            if g.nrows() != n || g.ncols() != n {
                return Err(Error::InvalidGroup(format!("generator is {}x{}, expected {n}x{n}", g.nrows(), g.ncols())));
            }
            let d = unitarity_defect(g);
            if d > UNITARY_TOL {
                return Err(Error::NotUnitary(d));
            }
        }
        let mut elements = vec![DMatrix::<C64>::identity(n, n)];
        let mut frontier = 0;
        while frontier < elements.len() {
            let e = elements[frontier].clone();
            frontier += 1;
            for g in &generators {
                let h = g * &e;
                if !elements.iter().any(|x| same(x, &h)) {
                    if elements.len() == MAX_GROUP_ORDER {
                        return Err(Error::InvalidGroup(format!("closure exceeds {MAX_GROUP_ORDER} elements")));
                    }
                    elements.push(h);
                }
            }
        }
        Ok(Self { n, labels, generators, elements })
    }

    pub fn from_spec(n: usize, spec: &GroupSpec) -> Result<Self> {
        Self::from_generators(n, spec.generators.iter().map(|m| m.0.clone()).collect(), spec.labels.clone())
    }

    pub fn to_spec(&self) -> GroupSpec {
        GroupSpec { labels: self.labels.clone(), generators: self.generators.iter().cloned().map(MatrixSpec).collect() }
    }

    pub fn trivial(n: usize) -> Self {
        Self::from_generators(n, Vec::new(), Vec::new()).expect("identity group")
    }

    /// `{+I, -I}`
    pub fn antipodal(n: usize) -> Self {
        Self::from_generators(n, vec![-DMatrix::<C64>::identity(n, n)], vec!["-I".into()]).expect("order 2")
    }

    /// Cyclic group generated by multiplying coordinate `k` by `e^{2 pi i / order}`.
    pub fn coordinate_rotation(n: usize, k: usize, order: u32) -> Result<Self> {
        let mut g = DMatrix::<C64>::identity(n, n);
        g[(k, k)] = C64::from_polar(1.0, std::f64::consts::TAU / order as f64);
        Self::from_generators(n, vec![g], vec![format!("rot{order}(z{})", k + 1)])
    }

    /// All sign changes `diag(+-1, ..., +-1)`.
    pub fn sign_changes(n: usize) -> Self {
        let gens = (0..n)
            .map(|k| {
                let mut g = DMatrix::<C64>::identity(n, n);
                g[(k, k)] = C64::new(-1.0, 0.0);
                g
            })
            .collect();
        let labels = (0..n).map(|k| format!("flip(z{})", k + 1)).collect();
        Self::from_generators(n, gens, labels).expect("sign group")
    }

    /// All coordinate permutations.
    pub fn coordinate_permutations(n: usize) -> Self {
        let gens = (0..n.saturating_sub(1))
            .map(|k| {
                let mut g = DMatrix::<C64>::zeros(n, n);
                for i in 0..n {
                    let j = if i == k {
                        k + 1
                    } else if i == k + 1 {
                        k
                    } else {
                        i
                    };
                    g[(i, j)] = C64::new(1.0, 0.0);
                }
                g
            })
            .collect();
        let labels = (0..n.saturating_sub(1)).map(|k| format!("swap(z{},z{})", k + 1, k + 2)).collect();
        Self::from_generators(n, gens, labels).expect("permutation group")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[DMatrix<C64>] {
        &self.elements
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn contains(&self, m: &DMatrix<C64>) -> bool {
        self.elements.iter().any(|x| same(x, m))
    }

    pub fn apply(&self, k: usize, z: &ComplexPoint) -> ComplexPoint {
        apply_matrix(&self.elements[k], z)
    }

    /// Fails with [`Error::GroupEscapesDomain`] if some element moves a
    /// sample point out of the domain.
    pub fn check_preserves(&self, domain: &Domain, samples: &[ComplexPoint]) -> Result<()> {
        for z in samples {
            if !domain.contains(z)? {
                continue;
            }
            for k in 0..self.order() {
                if !domain.contains(&self.apply(k, z))? {
                    return Err(Error::GroupEscapesDomain);
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn apply_matrix(m: &DMatrix<C64>, z: &ComplexPoint) -> ComplexPoint {
    ComplexPoint((m * DVector::from_column_slice(z.coords())).iter().copied().collect())
}
