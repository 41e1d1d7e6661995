use super::{ball_constant, boundary_point, RunOutput};
use crate::config::{with_amplitude, DirectionSpec, KlembeckConfig, StabilityConfig};
use crate::error::Result;
use crate::plot::LineChart;
use crate::table::{Cell, ModelInfo, ResultTable};
use bergman_core::curvature::{klembeck_scan, normal_and_tangent, ScanRow, ScanSchedule};
use bergman_core::geometry::{ComplexPoint, Domain};
use bergman_core::kernel::BergmanKernel;

/// Scan of one domain with its per-rung worst cases.
#[derive(Debug, Clone)]
pub struct DomainScan {
    pub rows: Vec<ScanRow>,
    /// `(dist, worst |S + 4/(n+1)|)` per rung, largest distance first. A rung
    /// with any flagged row has worst case NaN.
    pub worst: Vec<(f64, f64)>,
    /// Largest rung distance whose worst case is below epsilon, 0 if none.
    pub delta_star: f64,
    /// Largest rung distance such that every rung at or below it is below
    /// epsilon, 0 if none.
    pub delta_star_uniform: f64,
}

pub fn scan_domain(
    domain: &Domain,
    kernel: &dyn BergmanKernel,
    q: Option<&ComplexPoint>,
    distances: &[f64],
    directions: &[DirectionSpec],
    epsilon: f64,
) -> Result<DomainScan> {
    let q = boundary_point(domain, q)?;
    let (normal, tangent) = normal_and_tangent(domain, &q)?;
    let dirs: Vec<ComplexPoint> = directions.iter().map(|d| d.resolve(&normal, &tangent)).collect();
    let schedule = ScanSchedule::Distances { targets: distances.to_vec() };
    let rows = klembeck_scan(kernel, domain, &q, &schedule, &dirs, ball_constant(domain.dim()))?;
    let mut worst: Vec<(usize, f64, f64)> = Vec::new();
    for row in &rows {
        let dev = if row.flag.is_empty() { row.deviation } else { f64::NAN };
        match worst.iter_mut().find(|w| w.0 == row.rung) {
            Some(w) => w.2 = if w.2.is_nan() || dev.is_nan() { f64::NAN } else { w.2.max(dev) },
            None => worst.push((row.rung, row.dist, dev)),
        }
    }
    worst.sort_by(|a, b| b.1.total_cmp(&a.1));
    let worst: Vec<(f64, f64)> = worst.into_iter().map(|w| (w.1, w.2)).collect();
    let (delta_star, delta_star_uniform) = delta_stars(&worst, epsilon);
    Ok(DomainScan { rows, worst, delta_star, delta_star_uniform })
}

/// Both threshold distances of a worst-case column sorted by decreasing
/// distance.
pub(crate) fn delta_stars(worst: &[(f64, f64)], epsilon: f64) -> (f64, f64) {
    let below = |w: f64| w < epsilon;
    let first = worst.iter().find(|w| below(w.1)).map_or(0.0, |w| w.0);
    let mut uniform = 0.0;
    for w in worst.iter().rev() {
        if !below(w.1) {
            break;
        }
        uniform = w.0;
    }
    (first, uniform)
}

const COLUMNS: [&str; 18] = [
    "domain",
    "t",
    "degree",
    "rung",
    "dist",
    "s",
    "direction",
    "curvature",
    "deviation",
    "imag_residue",
    "flag",
    "worst",
    "epsilon",
    "delta_star",
    "delta_star_uniform",
    "min_delta_star",
    "base_delta_star",
    "pass",
];

fn push_scan(table: &mut ResultTable, scan: &DomainScan, label: &str, t: Option<f64>, degree: Option<u32>, directions: &[DirectionSpec], epsilon: f64) {
    for r in &scan.rows {
        table.push(
            "detail",
            vec![
                ("domain", label.into()),
                ("t", t.into()),
                ("degree", degree.into()),
                ("rung", r.rung.into()),
                ("dist", r.dist.into()),
                ("s", r.s.into()),
                ("direction", directions[r.direction_index].label(r.direction_index).into()),
                ("curvature", r.curvature.into()),
                ("deviation", r.deviation.into()),
                ("imag_residue", r.imag_residue.into()),
                ("flag", r.flag.clone().into()),
            ],
        );
    }
    for (k, &(dist, worst)) in scan.worst.iter().enumerate() {
        table.push(
            "rung",
            vec![
                ("domain", label.into()),
                ("t", t.into()),
                ("degree", degree.into()),
                ("rung", k.into()),
                ("dist", dist.into()),
                ("worst", worst.into()),
            ],
        );
    }
    table.push(
        "domain",
        vec![
            ("domain", label.into()),
            ("t", t.into()),
            ("degree", degree.into()),
            ("epsilon", epsilon.into()),
            ("delta_star", scan.delta_star.into()),
            ("delta_star_uniform", scan.delta_star_uniform.into()),
        ],
    );
}

pub fn run_klembeck(c: &KlembeckConfig) -> Result<RunOutput> {
    let mut table = ResultTable::new(&COLUMNS);
    let mut chart = LineChart::new("worst-case curvature deviation", "boundary distance", "max |S + 4/(n+1)|").log_axes(true, true);
    let mut models = Vec::new();
    for (i, spec) in c.domains.iter().enumerate() {
        let domain = Domain::new(spec.clone())?;
        let built = c.kernel.build(&domain)?;
        let label = format!("d{i}");
        models.push(ModelInfo { label: label.clone(), degree: built.degree, dropped_modes: built.dropped_modes });
        let q = c.boundary_points.as_ref().map(|ps| &ps[i]);
        let scan = scan_domain(&domain, built.kernel.as_ref(), q, &c.distances, &c.directions, c.epsilon)?;
        push_scan(&mut table, &scan, &label, None, built.degree, &c.directions, c.epsilon);
        chart.add_series(label, scan.worst.clone());
    }
    Ok(RunOutput { table, chart: Some(chart), models })
}

pub fn run_stability(c: &StabilityConfig) -> Result<RunOutput> {
    let mut table = ResultTable::new(&COLUMNS);
    let mut chart = LineChart::new("stability sweep", "boundary distance", "max |S + 4/(n+1)|").log_axes(true, true);
    let mut models = Vec::new();
    let mut stars = Vec::new();
    for (i, &t) in c.ladder.iter().enumerate() {
        let domain = Domain::new(with_amplitude(&c.base, t))?;
        let built = c.kernel.build(&domain)?;
        let label = format!("t{i}");
        models.push(ModelInfo { label: label.clone(), degree: built.degree, dropped_modes: built.dropped_modes });
        let scan = scan_domain(&domain, built.kernel.as_ref(), c.boundary_point.as_ref(), &c.distances, &c.directions, c.epsilon)?;
        push_scan(&mut table, &scan, &label, Some(t), built.degree, &c.directions, c.epsilon);
        chart.add_series(format!("t = {t}"), scan.worst.clone());
        stars.push(scan.delta_star);
    }
    let min = stars.iter().copied().fold(f64::INFINITY, f64::min);
    let base = stars[0];
    table.push(
        "summary",
        vec![
            ("epsilon", c.epsilon.into()),
            ("min_delta_star", Cell::Real(min)),
            ("base_delta_star", Cell::Real(base)),
            ("pass", (min > 0.0 && min >= 0.5 * base).into()),
        ],
    );
    Ok(RunOutput { table, chart: Some(chart), models })
}
