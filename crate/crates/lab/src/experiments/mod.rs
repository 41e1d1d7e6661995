//! Experiment runners. Each returns a [`ResultTable`] whose summary rows are
//! recomputable from its detail rows.

mod invariance;
mod klembeck;
mod localization;
mod orbit;
mod ramadanov;
mod sandwich;

pub use invariance::run_invariance;
pub use klembeck::{run_klembeck, run_stability, scan_domain, DomainScan};
pub use localization::run_localization;
pub use orbit::{exhaustion, run_orbit};
pub use ramadanov::{pair_grid, run_ramadanov};
pub use sandwich::run_sandwich;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::Result;
use crate::plot::LineChart;
use crate::table::{ModelInfo, ResultTable};
use bergman_core::geometry::{ComplexPoint, Domain};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct RunOutput {
    pub table: ResultTable,
    pub chart: Option<LineChart>,
    pub models: Vec<ModelInfo>,
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let seed = cfg.seed;
    match &cfg.experiment {
        Experiment::Klembeck(c) => run_klembeck(c),
        Experiment::Stability(c) => run_stability(c),
        Experiment::Ramadanov(c) => run_ramadanov(c),
        Experiment::Sandwich(c) => run_sandwich(c, seed),
        Experiment::Invariance(c) => run_invariance(c, seed),
        Experiment::Localization(c) => run_localization(c),
        Experiment::Orbit(c) => run_orbit(c, seed),
    }
}

/// The given boundary point, or the boundary crossing of the first
/// coordinate axis through the basis center.
pub(crate) fn boundary_point(domain: &Domain, given: Option<&ComplexPoint>) -> Result<ComplexPoint> {
    match given {
        Some(q) => Ok(q.clone()),
        None => Ok(domain.boundary_along_ray(&domain.basis_center(), &ComplexPoint::basis(domain.dim(), 0))?),
    }
}

/// `-4 / (n + 1)`
pub(crate) fn ball_constant(n: usize) -> f64 {
    -4.0 / (n as f64 + 1.0)
}

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Uniform point of the open ball of radius `radius` by rejection.
pub fn random_in_ball(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> ComplexPoint {
    loop {
        let xs: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let p = ComplexPoint::from_real(&xs);
        if p.norm() < 1.0 {
            return p.scale_real(radius);
        }
    }
}

/// Non-zero direction with entries uniform in the unit square.
pub fn random_direction(rng: &mut ChaCha8Rng, n: usize) -> ComplexPoint {
    loop {
        let xs: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v = ComplexPoint::from_real(&xs);
        if v.norm() > 1e-3 {
            return v;
        }
    }
}

/// Whether the last `len` entries are finite and non-increasing in absolute
/// value.
pub(crate) fn tail_non_increasing(values: &[f64], len: usize) -> bool {
    let tail = &values[values.len().saturating_sub(len)..];
    tail.iter().all(|v| v.is_finite()) && tail.windows(2).all(|w| w[1].abs() <= w[0].abs())
}
