//! Bounded domains `{rho < 0}` in `C^n` with exact first and second
//! Wirtinger derivatives of the defining function.

use crate::error::{check_dim, Error, Result};
use crate::geometry::rigid::{orthonormal_complement, RigidMotion};
use crate::geometry::{ComplexPoint, MultiIndex};
use crate::C64;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// One correction `c * Re(z^beta) * |z|^(2m)` of a perturbed ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationTerm {
    pub coefficient: f64,
    pub exponents: MultiIndex,
    #[serde(default)]
    pub radial_power: u32,
}

impl PerturbationTerm {
    fn growth_degree(&self) -> i32 {
        (self.exponents.degree() + 2 * self.radial_power) as i32
    }
}

/// Cut-off window used to localize a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Window {
    /// `Re <z, normal> > offset`, `normal` a unit vector.
    HalfSpace { normal: ComplexPoint, offset: f64 },
    /// `|z - center| < radius`.
    Ball { center: ComplexPoint, radius: f64 },
}

impl Window {
    fn rho(&self, z: &ComplexPoint) -> f64 {
        match self {
            Window::HalfSpace { normal, offset } => offset - z.inner(normal).re,
            Window::Ball { center, radius } => (z - center).norm_sqr() - radius * radius,
        }
    }

    fn jet(&self, z: &ComplexPoint) -> DefiningJet {
        let n = z.dim();
        match self {
            Window::HalfSpace { normal, .. } => DefiningJet {
                value: self.rho(z),
                dz: normal.0.iter().map(|c| -c.conj() * 0.5).collect(),
                dzdz: DMatrix::zeros(n, n),
                dzdzbar: DMatrix::zeros(n, n),
            },
            Window::Ball { center, .. } => DefiningJet {
                value: self.rho(z),
                dz: (z - center).0.iter().map(|c| c.conj()).collect(),
                dzdz: DMatrix::zeros(n, n),
                dzdzbar: DMatrix::identity(n, n),
            },
        }
    }

    fn distance(&self, z: &ComplexPoint) -> f64 {
        match self {
            Window::HalfSpace { normal, offset } => z.inner(normal).re - offset,
            Window::Ball { center, radius } => radius - (z - center).norm(),
        }
    }
}

/// Serializable description of a domain. Validated into a [`Domain`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    UnitBall { n: usize },
    Polydisc { n: usize, radii: Vec<f64> },
    /// `sum a_i |z_i|^2 < 1`.
    Ellipsoid { n: usize, coefficients: Vec<f64> },
    /// `|z|^2 - 1 + t * sum c Re(z^beta) |z|^(2m) < 0`.
    PerturbedBall { n: usize, t: f64, terms: Vec<PerturbationTerm> },
    /// Image of `inner` under a rigid motion.
    Shifted { n: usize, inner: Box<DomainSpec>, motion: RigidMotion },
    /// Intersection of `inner` with a window.
    Localized { n: usize, inner: Box<DomainSpec>, window: Window },
}

impl DomainSpec {
    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::UnitBall { n }
            | DomainSpec::Polydisc { n, .. }
            | DomainSpec::Ellipsoid { n, .. }
            | DomainSpec::PerturbedBall { n, .. }
            | DomainSpec::Shifted { n, .. }
            | DomainSpec::Localized { n, .. } => *n,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// The default perturbation term `Re(z_1^2)`.
    pub fn perturbed_ball(n: usize, t: f64) -> Self {
        let mut e = vec![0; n];
        e[0] = 2;
        DomainSpec::PerturbedBall {
            n,
            t,
            terms: vec![PerturbationTerm { coefficient: 1.0, exponents: MultiIndex(e), radial_power: 0 }],
        }
    }
}

/// Value and Wirtinger derivatives of a real defining function at a point.
#[derive(Debug, Clone)]
pub struct DefiningJet {
    pub value: f64,
    /// `d rho / d z_i`
    pub dz: Vec<C64>,
    /// `d^2 rho / d z_i d z_j`
    pub dzdz: DMatrix<C64>,
    /// `d^2 rho / d z_i d conj(z_j)` (complex Hessian, Hermitian)
    pub dzdzbar: DMatrix<C64>,
}

impl DefiningJet {
    /// Euclidean gradient as a complex vector, `2 conj(d rho / d z)`.
    pub fn gradient(&self) -> ComplexPoint {
        ComplexPoint(self.dz.iter().map(|c| c.conj() * 2.0).collect())
    }

    pub fn gradient_norm(&self) -> f64 {
        2.0 * self.dz.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Jet of `x -> rho(V x + c)` given the jet of `rho` at `V x + c`.
    pub fn pullback_linear(&self, v: &DMatrix<C64>) -> DefiningJet {
        let n = v.ncols();
        let dz = (0..n)
            .map(|k| (0..v.nrows()).map(|i| self.dz[i] * v[(i, k)]).sum())
            .collect();
        let dzdz = v.transpose() * &self.dzdz * v;
        let dzdzbar = v.transpose() * &self.dzdzbar * v.map(|c| c.conj());
        DefiningJet { value: self.value, dz, dzdz, dzdzbar }
    }

    /// Smallest eigenvalue of the complex Hessian restricted to the complex
    /// tangent space `{v : sum dz_i v_i = 0}`. `+inf` when `n = 1`.
    pub fn levi_min_eigenvalue(&self) -> Result<f64> {
        let n = self.dz.len();
        if n == 1 {
            return Ok(f64::INFINITY);
        }
        let w = ComplexPoint(self.dz.iter().map(|c| c.conj()).collect());
        let basis = orthonormal_complement(&w)?;
        let m = basis.len();
        let levi = DMatrix::from_fn(m, m, |k, l| {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    s += self.dzdzbar[(i, j)] * basis[k][i].conj() * basis[l][j];
                }
            }
            s
        });
        Ok(crate::linalg::hermitian_eigenvalues(&levi)[0])
    }
}

/// Affine axis-aligned box in the interleaved real coordinates
/// `(x_1, y_1, ..., x_n, y_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoundingBox {
    pub fn around(center: &ComplexPoint, radius: f64) -> Self {
        let c = center.to_real();
        Self {
            lo: c.iter().map(|x| x - radius).collect(),
            hi: c.iter().map(|x| x + radius).collect(),
        }
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    pub fn intersect(&self, other: &BoundingBox) -> BoundingBox {
        BoundingBox {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(*b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.min(*b)).collect(),
        }
    }

    pub fn contains_box(&self, other: &BoundingBox) -> bool {
        self.lo.iter().zip(&other.lo).all(|(a, b)| a <= b) && self.hi.iter().zip(&other.hi).all(|(a, b)| a >= b)
    }
}

/// Region of the squared moduli `t_i = |z_i|^2` describing a Reinhardt
/// domain.
#[derive(Debug, Clone, PartialEq)]
pub enum ReinhardtProfile {
    /// `sum a_i t_i < 1`
    Simplex(Vec<f64>),
    /// `t_i < r_i^2`
    Box(Vec<f64>),
}

#[derive(Debug, Clone)]
struct Perturbation {
    t: f64,
    terms: Vec<PerturbationTerm>,
    bound_radius: f64,
    t_max: f64,
}

#[derive(Debug, Clone)]
enum Shape {
    Ball,
    Polydisc(Vec<f64>),
    Ellipsoid(Vec<f64>),
    Perturbed(Perturbation),
    Shifted { inner: Box<Domain>, motion: RigidMotion },
    Localized { inner: Box<Domain>, window: Window },
}

/// A validated domain: the spec plus derived data (bounding sphere and box,
/// perturbation threshold).
#[derive(Debug, Clone)]
pub struct Domain {
    spec: DomainSpec,
    n: usize,
    shape: Shape,
    bound_center: ComplexPoint,
    bound_radius: f64,
    bbox: BoundingBox,
}

/// Collar half-width on which the gradient of the defining function is
/// checked to be non-zero.
pub const COLLAR_WIDTH: f64 = 0.1;

impl Domain {
    pub fn new(spec: DomainSpec) -> Result<Self> {
        let n = spec.dim();
        if n == 0 {
            return Err(Error::InvalidDomain("dimension must be at least 1".into()));
        }
        let (shape, center, radius, bbox) = match &spec {
            DomainSpec::UnitBall { .. } => {
                let c = ComplexPoint::zeros(n);
                (Shape::Ball, c.clone(), 1.0, BoundingBox::around(&c, 1.0))
            }
            DomainSpec::Polydisc { radii, .. } => {
                check_dim(n, radii.len())?;
                if radii.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
                    return Err(Error::InvalidDomain("polydisc radii must be positive".into()));
                }
                let c = ComplexPoint::zeros(n);
                let bbox = BoundingBox {
                    lo: radii.iter().flat_map(|&r| [-r, -r]).collect(),
                    hi: radii.iter().flat_map(|&r| [r, r]).collect(),
                };
                let big = radii.iter().map(|r| r * r).sum::<f64>().sqrt();
                (Shape::Polydisc(radii.clone()), c, big, bbox)
            }
            DomainSpec::Ellipsoid { coefficients, .. } => {
                check_dim(n, coefficients.len())?;
                if coefficients.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
                    return Err(Error::InvalidDomain("ellipsoid coefficients must be positive".into()));
                }
                let semi: Vec<f64> = coefficients.iter().map(|a| 1.0 / a.sqrt()).collect();
                let bbox = BoundingBox {
                    lo: semi.iter().flat_map(|&r| [-r, -r]).collect(),
                    hi: semi.iter().flat_map(|&r| [r, r]).collect(),
                };
                let r = semi.iter().cloned().fold(0.0, f64::max);
                (Shape::Ellipsoid(coefficients.clone()), ComplexPoint::zeros(n), r, bbox)
            }
            DomainSpec::PerturbedBall { t, terms, .. } => {
                for term in terms {
                    check_dim(n, term.exponents.dim())?;
                }
                if !(*t >= 0.0 && t.is_finite()) {
                    return Err(Error::InvalidDomain("perturbation amplitude must be non-negative".into()));
                }
                let t_max = pseudoconvexity_threshold(n, terms);
                if *t > 0.0 && *t >= t_max {
                    return Err(Error::InvalidDomain(format!(
                        "perturbation amplitude {t} exceeds the strong pseudoconvexity threshold {t_max:.6}"
                    )));
                }
                let r = bounding_radius(*t, terms)
                    .ok_or_else(|| Error::InvalidDomain("perturbed ball is not bounded".into()))?;
                let c = ComplexPoint::zeros(n);
                let p = Perturbation { t: *t, terms: terms.clone(), bound_radius: r, t_max };
                (Shape::Perturbed(p), c.clone(), r, BoundingBox::around(&c, r))
            }
            DomainSpec::Shifted { inner, motion, .. } => {
                check_dim(n, motion.dim())?;
                let motion = RigidMotion::new(motion.unitary.clone(), motion.translation.clone())?;
                let inner = Domain::new((**inner).clone())?;
                check_dim(n, inner.dim())?;
                let c = motion.apply(&inner.bound_center);
                let r = inner.bound_radius;
                let bbox = BoundingBox::around(&c, r);
                (Shape::Shifted { inner: Box::new(inner), motion }, c, r, bbox)
            }
            DomainSpec::Localized { inner, window, .. } => {
                let inner = Domain::new((**inner).clone())?;
                check_dim(n, inner.dim())?;
                let mut bbox = inner.bbox.clone();
                match window {
                    Window::Ball { center, radius } => {
                        check_dim(n, center.dim())?;
                        if !(*radius > 0.0) {
                            return Err(Error::InvalidDomain("window radius must be positive".into()));
                        }
                        bbox = bbox.intersect(&BoundingBox::around(center, *radius));
                    }
                    Window::HalfSpace { normal, offset } => {
                        check_dim(n, normal.dim())?;
                        if (normal.norm() - 1.0).abs() > 1e-12 {
                            return Err(Error::InvalidDomain("half-space normal must be a unit vector".into()));
                        }
                        // Clip along a real coordinate axis when the normal is one.
                        let re = normal.to_real();
                        if let Some(k) = re.iter().position(|x| (x.abs() - 1.0).abs() < 1e-15) {
                            if re[k] > 0.0 {
                                bbox.lo[k] = bbox.lo[k].max(*offset);
                            } else {
                                bbox.hi[k] = bbox.hi[k].min(-offset);
                            }
                        }
                    }
                }
                if bbox.lo.iter().zip(&bbox.hi).any(|(l, h)| l >= h) {
                    return Err(Error::InvalidDomain("window does not meet the domain".into()));
                }
                let c = inner.bound_center.clone();
                let r = inner.bound_radius;
                (Shape::Localized { inner: Box::new(inner), window: window.clone() }, c, r, bbox)
            }
        };
        Ok(Self { spec, n, shape, bound_center: center, bound_radius: radius, bbox })
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Every point of the domain lies within this distance of
    /// [`Domain::bound_center`].
    pub fn bound_radius(&self) -> f64 {
        self.bound_radius
    }

    pub fn bound_center(&self) -> &ComplexPoint {
        &self.bound_center
    }

    pub fn bounding_box(&self) -> &BoundingBox {
        &self.bbox
    }

    /// Strong pseudoconvexity threshold of a perturbed ball.
    pub fn perturbation_threshold(&self) -> Option<f64> {
        match &self.shape {
            Shape::Perturbed(p) => Some(p.t_max),
            _ => None,
        }
    }

    /// Squared-modulus profile when the domain is Reinhardt (circular in each
    /// coordinate) about the origin.
    pub fn reinhardt_profile(&self) -> Option<ReinhardtProfile> {
        match &self.shape {
            Shape::Ball => Some(ReinhardtProfile::Simplex(vec![1.0; self.n])),
            Shape::Ellipsoid(a) => Some(ReinhardtProfile::Simplex(a.clone())),
            Shape::Polydisc(r) => Some(ReinhardtProfile::Box(r.iter().map(|x| x * x).collect())),
            Shape::Perturbed(p) if p.t == 0.0 => Some(ReinhardtProfile::Simplex(vec![1.0; self.n])),
            _ => None,
        }
    }

    pub fn is_reinhardt(&self) -> bool {
        self.reinhardt_profile().is_some()
    }

    /// Natural expansion point for monomial bases on this domain.
    pub fn basis_center(&self) -> ComplexPoint {
        match &self.shape {
            Shape::Shifted { inner, motion } => motion.apply(&inner.basis_center()),
            Shape::Localized { .. } => {
                let mid: Vec<f64> = self.bbox.lo.iter().zip(&self.bbox.hi).map(|(l, h)| 0.5 * (l + h)).collect();
                ComplexPoint::from_real(&mid)
            }
            _ => ComplexPoint::zeros(self.n),
        }
    }

    /// Defining function value.
    pub fn rho(&self, z: &ComplexPoint) -> f64 {
        match &self.shape {
            Shape::Ball => z.norm_sqr() - 1.0,
            Shape::Polydisc(r) => z
                .coords()
                .iter()
                .zip(r)
                .map(|(zi, ri)| zi.norm_sqr() / (ri * ri) - 1.0)
                .fold(f64::NEG_INFINITY, f64::max),
            Shape::Ellipsoid(a) => z.coords().iter().zip(a).map(|(zi, ai)| ai * zi.norm_sqr()).sum::<f64>() - 1.0,
            Shape::Perturbed(p) => {
                let s = z.norm_sqr();
                s - 1.0
                    + p.t
                        * p.terms
                            .iter()
                            .map(|term| term.coefficient * term.exponents.monomial(z.coords()).re * s.powi(term.radial_power as i32))
                            .sum::<f64>()
            }
            Shape::Shifted { inner, motion } => inner.rho(&motion.apply_inverse(z)),
            Shape::Localized { inner, window } => inner.rho(z).max(window.rho(z)),
        }
    }

    /// Value and exact Wirtinger derivatives of the defining function. For
    /// the piecewise kinds (polydisc, localized) this is the jet of the
    /// active piece.
    pub fn defining_jet(&self, z: &ComplexPoint) -> Result<DefiningJet> {
        z.check_dim(self.n)?;
        let n = self.n;
        Ok(match &self.shape {
            Shape::Ball => DefiningJet {
                value: self.rho(z),
                dz: z.coords().iter().map(|c| c.conj()).collect(),
                dzdz: DMatrix::zeros(n, n),
                dzdzbar: DMatrix::identity(n, n),
            },
            Shape::Ellipsoid(a) => DefiningJet {
                value: self.rho(z),
                dz: z.coords().iter().zip(a).map(|(c, ai)| c.conj() * *ai).collect(),
                dzdz: DMatrix::zeros(n, n),
                dzdzbar: DMatrix::from_fn(n, n, |i, j| if i == j { C64::new(a[i], 0.0) } else { C64::new(0.0, 0.0) }),
            },
            Shape::Polydisc(r) => {
                let k = (0..n)
                    .max_by(|&i, &j| {
                        let vi = z[i].norm_sqr() / (r[i] * r[i]);
                        let vj = z[j].norm_sqr() / (r[j] * r[j]);
                        vi.total_cmp(&vj)
                    })
                    .unwrap_or(0);
                let inv = 1.0 / (r[k] * r[k]);
                let mut dz = vec![C64::new(0.0, 0.0); n];
                dz[k] = z[k].conj() * inv;
                let mut h = DMatrix::zeros(n, n);
                h[(k, k)] = C64::new(inv, 0.0);
                DefiningJet { value: self.rho(z), dz, dzdz: DMatrix::zeros(n, n), dzdzbar: h }
            }
            Shape::Perturbed(p) => perturbed_jet(z, p),
            Shape::Shifted { inner, motion } => {
                let x = motion.apply_inverse(z);
                inner.defining_jet(&x)?.pullback_linear(&motion.unitary.adjoint())
            }
            Shape::Localized { inner, window } => {
                if inner.rho(z) >= window.rho(z) {
                    inner.defining_jet(z)?
                } else {
                    window.jet(z)
                }
            }
        })
    }

    /// `rho(z) < 0`, and for perturbed balls `|z|` below the bounding radius.
    pub fn contains(&self, z: &ComplexPoint) -> Result<bool> {
        z.check_dim(self.n)?;
        Ok(self.contains_unchecked(z))
    }

    pub(crate) fn contains_unchecked(&self, z: &ComplexPoint) -> bool {
        match &self.shape {
            Shape::Perturbed(p) => z.norm() < p.bound_radius && self.rho(z) < 0.0,
            Shape::Shifted { inner, motion } => inner.contains_unchecked(&motion.apply_inverse(z)),
            Shape::Localized { inner, window } => inner.contains_unchecked(z) && window.rho(z) < 0.0,
            _ => self.rho(z) < 0.0,
        }
    }

    /// First boundary crossing along `origin + s * dir`, `s > 0`. The origin
    /// must be interior.
    pub fn boundary_along_ray(&self, origin: &ComplexPoint, dir: &ComplexPoint) -> Result<ComplexPoint> {
        origin.check_dim(self.n)?;
        dir.check_dim(self.n)?;
        if !self.contains_unchecked(origin) {
            return Err(Error::OutsideDomain { rho: self.rho(origin) });
        }
        let dir = dir.normalized().ok_or(Error::ZeroDirection)?;
        let at = |s: f64| origin + &dir.scale_real(s);
        let reach = origin.distance(&self.bound_center) + self.bound_radius;
        let steps = 4096;
        let h = reach * 1.001 / steps as f64;
        let mut lo = 0.0;
        let mut hi = None;
        for k in 1..=steps {
            let s = h * k as f64;
            if !self.contains_unchecked(&at(s)) {
                hi = Some(s);
                break;
            }
            lo = s;
        }
        let mut hi = hi.ok_or_else(|| Error::NonConvergence("ray never leaves the domain".into()))?;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.contains_unchecked(&at(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(at(0.5 * (lo + hi)))
    }

    pub(crate) fn shape_kind(&self) -> ShapeKind<'_> {
        match &self.shape {
            Shape::Ball => ShapeKind::Ball,
            Shape::Polydisc(r) => ShapeKind::Polydisc(r),
            Shape::Ellipsoid(a) => ShapeKind::Ellipsoid(a),
            Shape::Perturbed(_) => ShapeKind::General,
            Shape::Shifted { inner, motion } => ShapeKind::Shifted(inner, motion),
            Shape::Localized { inner, window } => ShapeKind::Localized(inner, window),
        }
    }

    pub(crate) fn window_distance(window: &Window, z: &ComplexPoint) -> f64 {
        window.distance(z)
    }
}

pub(crate) enum ShapeKind<'a> {
    Ball,
    Polydisc(&'a [f64]),
    Ellipsoid(&'a [f64]),
    General,
    Shifted(&'a Domain, &'a RigidMotion),
    Localized(&'a Domain, &'a Window),
}

fn perturbed_jet(z: &ComplexPoint, p: &Perturbation) -> DefiningJet {
    let n = z.dim();
    let zc = z.coords();
    let s = z.norm_sqr();
    let mut dz: Vec<C64> = zc.iter().map(|c| c.conj()).collect();
    let mut dzdz = DMatrix::<C64>::zeros(n, n);
    let mut dzdzbar = DMatrix::<C64>::identity(n, n);
    let zero = C64::new(0.0, 0.0);
    for term in &p.terms {
        let c = p.t * term.coefficient;
        if c == 0.0 {
            continue;
        }
        let beta = &term.exponents;
        let m = term.radial_power as i32;
        let h = beta.monomial(zc);
        let re_h = h.re;
        let hi: Vec<C64> = (0..n).map(|i| monomial_derivative(beta, &MultiIndex::unit(n, i), zc)).collect();
        let hij = DMatrix::from_fn(n, n, |i, j| {
            monomial_derivative(beta, &MultiIndex::unit(n, i).add(&MultiIndex::unit(n, j)), zc)
        });
        let q = s.powi(m);
        let c1 = if m >= 1 { m as f64 * s.powi(m - 1) } else { 0.0 };
        let c2 = if m >= 2 { (m * (m - 1)) as f64 * s.powi(m - 2) } else { 0.0 };
        let qi: Vec<C64> = zc.iter().map(|w| w.conj() * c1).collect();
        let qib: Vec<C64> = zc.iter().map(|w| w * c1).collect();
        for i in 0..n {
            dz[i] += c * (hi[i] * 0.5 * q + re_h * qi[i]);
            for j in 0..n {
                let qij = if c2 != 0.0 { zc[i].conj() * zc[j].conj() * c2 } else { zero };
                dzdz[(i, j)] += c * (hij[(i, j)] * 0.5 * q + hi[i] * 0.5 * qi[j] + hi[j] * 0.5 * qi[i] + re_h * qij);
                let mut qijb = if c2 != 0.0 { zc[i].conj() * zc[j] * c2 } else { zero };
                if i == j {
                    qijb += c1;
                }
                dzdzbar[(i, j)] += c * (hi[i] * 0.5 * qib[j] + hi[j].conj() * 0.5 * qi[i] + re_h * qijb);
            }
        }
    }
    DefiningJet { value: s - 1.0 + perturbation_value(z, p), dz, dzdz, dzdzbar }
}

fn perturbation_value(z: &ComplexPoint, p: &Perturbation) -> f64 {
    let s = z.norm_sqr();
    p.t * p
        .terms
        .iter()
        .map(|t| t.coefficient * t.exponents.monomial(z.coords()).re * s.powi(t.radial_power as i32))
        .sum::<f64>()
}

/// `d^a z^beta` by the exponent-shift rule.
pub fn monomial_derivative(beta: &MultiIndex, a: &MultiIndex, z: &[C64]) -> C64 {
    match beta.checked_sub(a) {
        None => C64::new(0.0, 0.0),
        Some(rest) => {
            let coef: f64 = beta
                .exponents()
                .iter()
                .zip(a.exponents())
                .map(|(&b, &k)| (0..k).map(|i| f64::from(b - i)).product::<f64>())
                .product();
            rest.monomial(z) * coef
        }
    }
}

/// Smallest `R >= 1` with `R^2 - 1 - t sum |c| R^k >= 0`, which makes
/// `rho >= 0` on the sphere of radius `R`.
fn bounding_radius(t: f64, terms: &[PerturbationTerm]) -> Option<f64> {
    let mass: f64 = terms.iter().map(|x| x.coefficient.abs()).sum();
    if t * mass == 0.0 {
        return Some(1.0);
    }
    let f = |r: f64| r * r - 1.0 - t * terms.iter().map(|x| x.coefficient.abs() * r.powi(x.growth_degree())).sum::<f64>();
    let (mut lo, mut hi) = (1.0, None);
    let mut r = 1.0;
    while r <= 4.0 {
        if f(r) > 0.0 {
            hi = Some(r);
            break;
        }
        lo = r;
        r += 1e-3;
    }
    let mut hi = hi?;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

const LEVI_SAMPLES: usize = 128;

/// Largest amplitude in `[0, 1]` for which the perturbed ball stays bounded
/// and has positive Levi form at sampled boundary points.
fn pseudoconvexity_threshold(n: usize, terms: &[PerturbationTerm]) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1e71);
    let dirs: Vec<ComplexPoint> = (0..LEVI_SAMPLES)
        .map(|_| {
            let v: Vec<C64> = (0..n).map(|_| C64::new(gaussian(&mut rng), gaussian(&mut rng))).collect();
            ComplexPoint(v).normalized().unwrap_or_else(|| ComplexPoint::basis(n, 0))
        })
        .collect();
    let ok = |t: f64| -> bool {
        let spec = DomainSpec::PerturbedBall { n, t, terms: terms.to_vec() };
        let Some(r) = bounding_radius(t, terms) else { return false };
        let p = Perturbation { t, terms: terms.to_vec(), bound_radius: r, t_max: f64::INFINITY };
        let c = ComplexPoint::zeros(n);
        let dom = Domain {
            spec,
            n,
            shape: Shape::Perturbed(p),
            bound_center: c.clone(),
            bound_radius: r,
            bbox: BoundingBox::around(&c, r),
        };
        if !dom.contains_unchecked(&c) {
            return false;
        }
        dirs.iter().all(|d| {
            dom.boundary_along_ray(&c, d)
                .and_then(|q| dom.defining_jet(&q))
                .map(|jet| jet.gradient_norm() > 1e-8 && jet.levi_min_eigenvalue().map_or(false, |l| l > 1e-9))
                .unwrap_or(false)
        })
    };
    if ok(1.0) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

pub(crate) fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn contains_examples() {
        let ball = Domain::new(DomainSpec::UnitBall { n: 2 }).unwrap();
        assert!(ball.contains(&ComplexPoint::zeros(2)).unwrap());
        assert!(!ball.contains(&ComplexPoint::real(&[1.0, 0.0])).unwrap());
        let ell = Domain::new(DomainSpec::Ellipsoid { n: 2, coefficients: vec![1.0, 2.0] }).unwrap();
        assert!(!ell.contains(&ComplexPoint::real(&[0.0, 0.8])).unwrap());
        assert!(matches!(ball.contains(&ComplexPoint::zeros(3)), Err(Error::DimensionMismatch { .. })));
    }

    fn fd_check(dom: &Domain, z: &ComplexPoint) {
        let jet = dom.defining_jet(z).unwrap();
        let n = z.dim();
        let h = 1e-5;
        // d/dz = (d/dx - i d/dy)/2
        let shift = |k: usize, d: C64| {
            let mut w = z.clone();
            w[k] += d;
            w
        };
        for k in 0..n {
            let dx = (dom.rho(&shift(k, c(h, 0.0))) - dom.rho(&shift(k, c(-h, 0.0)))) / (2.0 * h);
            let dy = (dom.rho(&shift(k, c(0.0, h))) - dom.rho(&shift(k, c(0.0, -h)))) / (2.0 * h);
            let dz = c(dx, -dy) * 0.5;
            assert!((dz - jet.dz[k]).norm() < 1e-8, "dz[{k}] {dz} vs {}", jet.dz[k]);
            for l in 0..n {
                let dzk = |w: &ComplexPoint| dom.defining_jet(w).unwrap().dz[k];
                let gx = (dzk(&shift(l, c(h, 0.0))) - dzk(&shift(l, c(-h, 0.0)))) / (2.0 * h);
                let gy = (dzk(&shift(l, c(0.0, h))) - dzk(&shift(l, c(0.0, -h)))) / (2.0 * h);
                let dzl = (gx - gy * c(0.0, 1.0)) * 0.5;
                let dzbl = (gx + gy * c(0.0, 1.0)) * 0.5;
                assert!((dzl - jet.dzdz[(k, l)]).norm() < 1e-7, "dzdz {k}{l}");
                assert!((dzbl - jet.dzdzbar[(k, l)]).norm() < 1e-7, "dzdzbar {k}{l}");
            }
        }
    }

    #[test]
    fn perturbed_jet_matches_finite_differences() {
        let spec = DomainSpec::PerturbedBall {
            n: 2,
            t: 0.1,
            terms: vec![
                PerturbationTerm { coefficient: 1.0, exponents: MultiIndex(vec![2, 0]), radial_power: 0 },
                PerturbationTerm { coefficient: -0.5, exponents: MultiIndex(vec![1, 1]), radial_power: 1 },
                PerturbationTerm { coefficient: 0.3, exponents: MultiIndex(vec![0, 1]), radial_power: 2 },
            ],
        };
        let dom = Domain::new(spec).unwrap();
        fd_check(&dom, &ComplexPoint::new(vec![c(0.3, -0.2), c(0.1, 0.4)]));
        fd_check(&dom, &ComplexPoint::new(vec![c(-0.5, 0.1), c(0.2, -0.6)]));
    }

    #[test]
    fn shifted_jet_matches_finite_differences() {
        let u = crate::geometry::rigid::householder_to_axis(
            &ComplexPoint::new(vec![c(0.6, 0.0), c(0.0, 0.8)]),
            c(-1.0, 0.0),
        )
        .unwrap();
        let motion = RigidMotion::new(u, ComplexPoint::real(&[0.3, -0.1])).unwrap();
        let spec = DomainSpec::Shifted {
            n: 2,
            inner: Box::new(DomainSpec::Ellipsoid { n: 2, coefficients: vec![1.0, 3.0] }),
            motion,
        };
        let dom = Domain::new(spec).unwrap();
        fd_check(&dom, &ComplexPoint::new(vec![c(0.2, 0.1), c(-0.3, 0.2)]));
    }

    #[test]
    fn perturbed_threshold_and_rejection() {
        let dom = Domain::new(DomainSpec::perturbed_ball(2, 0.05)).unwrap();
        let t_max = dom.perturbation_threshold().unwrap();
        // Re(z1^2) is pluriharmonic, so only boundedness limits the amplitude.
        // The radius search stops at R = 4, i.e. t = 15/16.
        assert!((t_max - 0.9375).abs() < 1e-6, "t_max {t_max}");
        assert!(Domain::new(DomainSpec::perturbed_ball(2, 1.5)).is_err());
    }

    #[test]
    fn levi_form_positive_on_perturbed_boundary() {
        let dom = Domain::new(DomainSpec::perturbed_ball(2, 0.2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..64 {
            let d = ComplexPoint(vec![c(gaussian(&mut rng), gaussian(&mut rng)), c(gaussian(&mut rng), gaussian(&mut rng))]);
            let q = dom.boundary_along_ray(&ComplexPoint::zeros(2), &d).unwrap();
            let jet = dom.defining_jet(&q).unwrap();
            assert!(jet.value.abs() < 1e-12);
            assert!(jet.levi_min_eigenvalue().unwrap() > 0.0);
        }
    }

    #[test]
    fn gradient_nonzero_on_collar() {
        let specs = vec![
            DomainSpec::UnitBall { n: 2 },
            DomainSpec::Ellipsoid { n: 2, coefficients: vec![1.0, 2.0] },
            DomainSpec::perturbed_ball(2, 0.05),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for spec in specs {
            let dom = Domain::new(spec).unwrap();
            for _ in 0..100 {
                let d = ComplexPoint(vec![c(gaussian(&mut rng), gaussian(&mut rng)), c(gaussian(&mut rng), gaussian(&mut rng))]);
                let q = dom.boundary_along_ray(&ComplexPoint::zeros(2), &d).unwrap();
                let s: f64 = rng.gen_range(0.0..COLLAR_WIDTH);
                let z = q.scale_real(1.0 - s);
                assert!(dom.defining_jet(&z).unwrap().gradient_norm() > 1e-3);
            }
        }
    }

    #[test]
    fn bounded_by_stored_radius() {
        let dom = Domain::new(DomainSpec::perturbed_ball(2, 0.3)).unwrap();
        let r = dom.bound_radius();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20000 {
            let z = ComplexPoint::from_real(&(0..4).map(|_| rng.gen_range(-2.0..2.0)).collect::<Vec<_>>());
            if dom.contains(&z).unwrap() {
                assert!(z.norm() < r);
            }
        }
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = DomainSpec::Localized {
            n: 2,
            inner: Box::new(DomainSpec::perturbed_ball(2, 0.02)),
            window: Window::HalfSpace { normal: ComplexPoint::basis(2, 0), offset: 0.2 },
        };
        let s = spec.to_json().unwrap();
        assert_eq!(DomainSpec::from_json(&s).unwrap(), spec);
        let raw = r#"{"kind":"ellipsoid","n":2,"coefficients":[1.0,2.0]}"#;
        assert_eq!(
            DomainSpec::from_json(raw).unwrap(),
            DomainSpec::Ellipsoid { n: 2, coefficients: vec![1.0, 2.0] }
        );
    }
}
