use crate::error::{invalid, Result};
use bergman_core::geometry::{Domain, DomainSpec, SamplePlan};
use bergman_core::kernel::{build_kernel_model, BasisSpec, BergmanKernel, ClosedFormKernel};
use bergman_core::linalg::PIVOT_THRESHOLD;
use bergman_core::symmetry::{FiniteUnitaryGroup, GroupSpec};
use bergman_core::ComplexPoint;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Arc;

/// One experiment file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Stem of the output files.
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(flatten)]
    pub experiment: Experiment,
    #[serde(default)]
    pub output: OutputSpec,
    /// Metadata of the higher-degree run the thresholds were calibrated
    /// against; echoed into the run metadata.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum Experiment {
    Klembeck(KlembeckConfig),
    Stability(StabilityConfig),
    Ramadanov(RamadanovConfig),
    Sandwich(SandwichConfig),
    Invariance(InvarianceConfig),
    Localization(LocalizationConfig),
    Orbit(OrbitConfig),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Klembeck(_) => "klembeck",
            Experiment::Stability(_) => "stability",
            Experiment::Ramadanov(_) => "ramadanov",
            Experiment::Sandwich(_) => "sandwich",
            Experiment::Invariance(_) => "invariance",
            Experiment::Localization(_) => "localization",
            Experiment::Orbit(_) => "orbit",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    /// Write an SVG line chart next to the CSV.
    #[serde(default)]
    pub svg: bool,
}

/// Where kernel values come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    /// Exact kernel of a ball or polydisc.
    ClosedForm,
    /// Truncated Gram model.
    Model {
        degree: u32,
        plan: SamplePlan,
        #[serde(default = "default_tau")]
        tau: f64,
    },
}

fn default_tau() -> f64 {
    PIVOT_THRESHOLD
}

/// A kernel plus the bookkeeping the run metadata reports.
pub struct BuiltKernel {
    pub kernel: Arc<dyn BergmanKernel>,
    pub degree: Option<u32>,
    pub dropped_modes: usize,
}

impl KernelSpec {
    fn validate(&self, domain: &DomainSpec) -> Result<()> {
        match self {
            KernelSpec::ClosedForm => match domain {
                DomainSpec::UnitBall { .. } | DomainSpec::Polydisc { .. } => Ok(()),
                _ => invalid("closed-form kernels exist only for balls and polydiscs"),
            },
            KernelSpec::Model { degree, tau, .. } => {
                if *degree < 2 {
                    return invalid(format!("basis degree must be at least 2, got {degree}"));
                }
                if !(*tau > 0.0) {
                    return invalid(format!("pivot threshold must be positive, got {tau}"));
                }
                Ok(())
            }
        }
    }

    pub fn build(&self, domain: &Domain) -> Result<BuiltKernel> {
        match self {
            KernelSpec::ClosedForm => {
                let kernel: Arc<dyn BergmanKernel> = match domain.spec() {
                    DomainSpec::UnitBall { n } => Arc::new(ClosedFormKernel::ball(*n)),
                    DomainSpec::Polydisc { radii, .. } => Arc::new(ClosedFormKernel::polydisc(radii.clone())),
                    _ => return invalid("closed-form kernels exist only for balls and polydiscs"),
                };
                Ok(BuiltKernel { kernel, degree: None, dropped_modes: 0 })
            }
            KernelSpec::Model { degree, plan, tau } => {
                let m = build_kernel_model(domain, &BasisSpec::new(domain.dim(), *degree), plan, *tau)?;
                let dropped_modes = m.dropped_modes().len();
                Ok(BuiltKernel { kernel: Arc::new(m), degree: Some(*degree), dropped_modes })
            }
        }
    }
}

/// A curvature direction at a boundary point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DirectionSpec {
    Named(NamedDirection),
    Vector(ComplexPoint),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedDirection {
    /// Inward unit normal.
    Normal,
    /// Unit complex-tangential direction orthogonal to the normal.
    Tangent,
}

impl DirectionSpec {
    pub fn label(&self, index: usize) -> String {
        match self {
            DirectionSpec::Named(NamedDirection::Normal) => "normal".into(),
            DirectionSpec::Named(NamedDirection::Tangent) => "tangent".into(),
            DirectionSpec::Vector(_) => format!("v{index}"),
        }
    }

    pub fn resolve(&self, normal: &ComplexPoint, tangent: &ComplexPoint) -> ComplexPoint {
        match self {
            DirectionSpec::Named(NamedDirection::Normal) => normal.clone(),
            DirectionSpec::Named(NamedDirection::Tangent) => tangent.clone(),
            DirectionSpec::Vector(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KlembeckConfig {
    pub domains: Vec<DomainSpec>,
    pub kernel: KernelSpec,
    /// One boundary point per domain; defaults to the boundary crossing of
    /// the first coordinate axis.
    #[serde(default)]
    pub boundary_points: Option<Vec<ComplexPoint>>,
    /// Target boundary distances, strictly decreasing.
    pub distances: Vec<f64>,
    pub directions: Vec<DirectionSpec>,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityConfig {
    /// Perturbed ball whose amplitude is swept.
    pub base: DomainSpec,
    /// Amplitudes `t`, strictly increasing.
    pub ladder: Vec<f64>,
    pub kernel: KernelSpec,
    #[serde(default)]
    pub boundary_point: Option<ComplexPoint>,
    pub distances: Vec<f64>,
    pub directions: Vec<DirectionSpec>,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamadanovConfig {
    pub domain: DomainSpec,
    pub kernel: KernelSpec,
    #[serde(default)]
    pub boundary_point: Option<ComplexPoint>,
    /// Rungs `nu`; the base point sits at distance `2^-nu`. Strictly increasing.
    pub nu: Vec<u32>,
    /// Points per side of the pair grid in the closed ball of radius 1/2.
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
}

fn default_grid_points() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichConfig {
    pub domain: DomainSpec,
    #[serde(default)]
    pub boundary_point: Option<ComplexPoint>,
    /// Target boundary distances, strictly decreasing.
    pub distances: Vec<f64>,
    pub r: f64,
    pub samples: usize,
    #[serde(default = "default_window")]
    pub window_radius: f64,
}

fn default_window() -> f64 {
    bergman_core::scaling::DEFAULT_WINDOW_RADIUS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceConfig {
    pub n: usize,
    pub kernel: KernelSpec,
    /// Number of random (automorphism, point, direction) triples.
    pub count: usize,
    /// Points and automorphism centers are drawn from this radius.
    #[serde(default = "default_radius")]
    pub max_radius: f64,
}

fn default_radius() -> f64 {
    0.9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationConfig {
    pub full: DomainSpec,
    pub full_kernel: KernelSpec,
    pub localized: DomainSpec,
    pub localized_kernel: KernelSpec,
    /// Boundary point shared by both domains.
    #[serde(default)]
    pub boundary_point: Option<ComplexPoint>,
    /// Ray parameters `s` of `p = q + s n`, strictly decreasing.
    pub offsets: Vec<f64>,
    pub directions: Vec<DirectionSpec>,
    /// Bound on the final `|ratio|`.
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitConfig {
    pub domain: DomainSpec,
    pub groups: Vec<GroupChoice>,
    /// Random interior points per group.
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "group", rename_all = "snake_case")]
pub enum GroupChoice {
    Trivial,
    Antipodal,
    Rotation { coordinate: usize, order: u32 },
    SignChanges,
    Permutations,
    Generated(GroupSpec),
}

impl GroupChoice {
    pub fn build(&self, n: usize) -> Result<FiniteUnitaryGroup> {
        Ok(match self {
            GroupChoice::Trivial => FiniteUnitaryGroup::trivial(n),
            GroupChoice::Antipodal => FiniteUnitaryGroup::antipodal(n),
            GroupChoice::Rotation { coordinate, order } => {
                if *coordinate >= n {
                    return invalid(format!("rotation coordinate {coordinate} out of range for n = {n}"));
                }
                FiniteUnitaryGroup::coordinate_rotation(n, *coordinate, *order)?
            }
            GroupChoice::SignChanges => FiniteUnitaryGroup::sign_changes(n),
            GroupChoice::Permutations => FiniteUnitaryGroup::coordinate_permutations(n),
            GroupChoice::Generated(spec) => FiniteUnitaryGroup::from_spec(n, spec)?,
        })
    }

    pub fn label(&self) -> String {
        match self {
            GroupChoice::Trivial => "trivial".into(),
            GroupChoice::Antipodal => "antipodal".into(),
            GroupChoice::Rotation { coordinate, order } => format!("rotation{coordinate}x{order}"),
            GroupChoice::SignChanges => "sign_changes".into(),
            GroupChoice::Permutations => "permutations".into(),
            GroupChoice::Generated(spec) if !spec.labels.is_empty() => spec.labels.join("+"),
            GroupChoice::Generated(_) => "generated".into(),
        }
    }
}

fn strictly(values: &[f64], decreasing: bool, what: &str) -> Result<()> {
    if values.is_empty() {
        return invalid(format!("{what} ladder is empty"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return invalid(format!("{what} ladder has non-finite entries"));
    }
    let ok = values.windows(2).all(|w| if decreasing { w[1] < w[0] } else { w[1] > w[0] });
    if !ok {
        let dir = if decreasing { "decreasing" } else { "increasing" };
        return invalid(format!("{what} ladder must be strictly {dir}"));
    }
    Ok(())
}

fn positive(v: f64, what: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        invalid(format!("{what} must be positive, got {v}"))
    }
}

fn check_domain(spec: &DomainSpec) -> Result<Domain> {
    Domain::new(spec.clone()).or_else(|e| invalid(format!("domain rejected: {e}")))
}

fn check_point(p: &Option<ComplexPoint>, n: usize) -> Result<()> {
    match p {
        Some(q) if q.dim() != n => invalid(format!("boundary point has dimension {}, domain has {n}", q.dim())),
        _ => Ok(()),
    }
}

fn check_directions(dirs: &[DirectionSpec], n: usize) -> Result<()> {
    if dirs.is_empty() {
        return invalid("direction set is empty");
    }
    for d in dirs {
        if let DirectionSpec::Vector(v) = d {
            if v.dim() != n || v.norm() == 0.0 {
                return invalid("explicit directions must be non-zero with the domain dimension");
            }
        }
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .or_else(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return invalid("name must be a non-empty file stem");
        }
        match &self.experiment {
            Experiment::Klembeck(c) => {
                if c.domains.is_empty() {
                    return invalid("no domains given");
                }
                for d in &c.domains {
                    check_domain(d)?;
                    c.kernel.validate(d)?;
                    check_directions(&c.directions, d.dim())?;
                }
                if let Some(ps) = &c.boundary_points {
                    if ps.len() != c.domains.len() {
                        return invalid("need one boundary point per domain");
                    }
                    for (p, d) in ps.iter().zip(&c.domains) {
                        check_point(&Some(p.clone()), d.dim())?;
                    }
                }
                strictly(&c.distances, true, "distance")?;
                c.distances.iter().try_for_each(|&d| positive(d, "distance"))?;
                positive(c.epsilon, "epsilon")
            }
            Experiment::Stability(c) => {
                if !matches!(c.base, DomainSpec::PerturbedBall { .. }) {
                    return invalid("stability sweeps need a perturbed ball");
                }
                strictly(&c.ladder, false, "perturbation")?;
                if c.ladder[0] < 0.0 {
                    return invalid("perturbation amplitudes must be non-negative");
                }
                for &t in &c.ladder {
                    check_domain(&with_amplitude(&c.base, t))?;
                }
                c.kernel.validate(&c.base)?;
                check_point(&c.boundary_point, c.base.dim())?;
                check_directions(&c.directions, c.base.dim())?;
                strictly(&c.distances, true, "distance")?;
                c.distances.iter().try_for_each(|&d| positive(d, "distance"))?;
                positive(c.epsilon, "epsilon")
            }
            Experiment::Ramadanov(c) => {
                check_domain(&c.domain)?;
                c.kernel.validate(&c.domain)?;
                check_point(&c.boundary_point, c.domain.dim())?;
                let nu: Vec<f64> = c.nu.iter().map(|&v| f64::from(v)).collect();
                strictly(&nu, false, "nu")?;
                if c.grid_points == 0 {
                    return invalid("grid needs at least one point");
                }
                Ok(())
            }
            Experiment::Sandwich(c) => {
                check_domain(&c.domain)?;
                check_point(&c.boundary_point, c.domain.dim())?;
                strictly(&c.distances, true, "distance")?;
                c.distances.iter().try_for_each(|&d| positive(d, "distance"))?;
                positive(c.r, "r")?;
                positive(c.window_radius, "window radius")?;
                if c.samples == 0 {
                    return invalid("samples must be positive");
                }
                Ok(())
            }
            Experiment::Invariance(c) => {
                if c.n == 0 {
                    return invalid("dimension must be positive");
                }
                c.kernel.validate(&DomainSpec::UnitBall { n: c.n })?;
                if c.count == 0 {
                    return invalid("count must be positive");
                }
                if !(c.max_radius > 0.0 && c.max_radius < 1.0) {
                    return invalid("max_radius must lie in (0, 1)");
                }
                Ok(())
            }
            Experiment::Localization(c) => {
                check_domain(&c.full)?;
                check_domain(&c.localized)?;
                if c.full.dim() != c.localized.dim() {
                    return invalid("full and localized domains differ in dimension");
                }
                c.full_kernel.validate(&c.full)?;
                c.localized_kernel.validate(&c.localized)?;
                check_point(&c.boundary_point, c.full.dim())?;
                check_directions(&c.directions, c.full.dim())?;
                strictly(&c.offsets, true, "offset")?;
                c.offsets.iter().try_for_each(|&d| positive(d, "offset"))?;
                positive(c.threshold, "threshold")
            }
            Experiment::Orbit(c) => {
                let domain = check_domain(&c.domain)?;
                if c.groups.is_empty() {
                    return invalid("no groups given");
                }
                for g in &c.groups {
                    g.build(domain.dim())?;
                }
                if c.points == 0 {
                    return invalid("points must be positive");
                }
                Ok(())
            }
        }
    }
}

/// The perturbed ball `base` with amplitude `t`.
pub fn with_amplitude(base: &DomainSpec, t: f64) -> DomainSpec {
    let mut spec = base.clone();
    if let DomainSpec::PerturbedBall { t: amp, .. } = &mut spec {
        *amp = t;
    }
    spec
}

#[cfg(test)]
mod tests {
    use super::*;

    fn klembeck(distances: &str, directions: &str) -> String {
        format!(
            r#"{{"name": "k", "experiment": "klembeck",
                "domains": [{{"kind": "unit_ball", "n": 2}}],
                "kernel": {{"kind": "closed_form"}},
                "distances": {distances}, "directions": {directions}, "epsilon": 0.1}}"#
        )
    }

    #[test]
    fn accepts_valid_klembeck() {
        let cfg = ExperimentConfig::from_json(&klembeck("[0.3, 0.1]", r#"["normal", "tangent"]"#)).unwrap();
        assert_eq!(cfg.experiment.kind(), "klembeck");
        let back = ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_non_monotone_ladder() {
        assert!(ExperimentConfig::from_json(&klembeck("[0.1, 0.3]", r#"["normal"]"#)).is_err());
        assert!(ExperimentConfig::from_json(&klembeck("[0.1, 0.1]", r#"["normal"]"#)).is_err());
    }

    #[test]
    fn rejects_empty_direction_set() {
        let e = ExperimentConfig::from_json(&klembeck("[0.3]", "[]")).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn rejects_low_degree_and_bad_amplitude() {
        let low = r#"{"name": "s", "experiment": "stability",
            "base": {"kind": "perturbed_ball", "n": 2, "t": 0.0,
                     "terms": [{"coefficient": 1.0, "exponents": [2, 0], "radial_power": 0}]},
            "ladder": [0.0, 0.02], "kernel": {"kind": "model", "degree": 1, "plan": {"method": "product", "radial": 8, "angular": 8}},
            "distances": [0.5], "directions": ["normal"], "epsilon": 0.2}"#;
        assert!(ExperimentConfig::from_json(low).is_err());
        let above = low.replace("\"degree\": 1", "\"degree\": 4").replace("[0.0, 0.02]", "[0.0, 0.99]");
        let e = ExperimentConfig::from_json(&above).unwrap_err();
        assert!(e.to_string().contains("threshold"), "{e}");
    }
}
