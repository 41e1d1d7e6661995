use super::{boundary_point, tail_non_increasing, RunOutput};
use crate::config::SandwichConfig;
use crate::error::Result;
use crate::plot::LineChart;
use crate::table::{Cell, ResultTable};
use bergman_core::curvature::{normal_and_tangent, resolve_ladder, ScanSchedule};
use bergman_core::geometry::Domain;
use bergman_core::scaling::{build_chain_at, minimal_feasible_r, sandwich_check};

/// Largest tolerated share of Newton inversion failures.
pub const MAX_FAILURE_RATE: f64 = 1e-3;

pub fn run_sandwich(c: &SandwichConfig, seed: u64) -> Result<RunOutput> {
    let domain = Domain::new(c.domain.clone())?;
    let q = boundary_point(&domain, c.boundary_point.as_ref())?;
    let (normal, _) = normal_and_tangent(&domain, &q)?;
    let offsets = resolve_ladder(&domain, &q, &normal, &ScanSchedule::Distances { targets: c.distances.clone() })?;
    let mut table = ResultTable::new(&[
        "rung",
        "dist",
        "lambda",
        "r",
        "window_radius",
        "samples",
        "seed",
        "inner_ok",
        "outer_ok",
        "inner_violations",
        "outer_violations",
        "newton_failures",
        "failure_rate",
        "outer_margin",
        "inner_margin",
        "min_feasible_r",
        "pass",
        "min_r_non_increasing",
    ]);
    let mut min_rs = Vec::new();
    let mut last_pass = false;
    for (k, (&dist, &s)) in c.distances.iter().zip(&offsets).enumerate() {
        let p = &q + &normal.scale_real(s);
        let chain = build_chain_at(&domain, &p, &q)?;
        let rep = sandwich_check(&chain, &domain, c.window_radius, c.r, c.samples, seed)?;
        let min_r = minimal_feasible_r(&chain, &domain, c.window_radius, c.samples, seed)?;
        let rate = rep.newton_failures as f64 / rep.inner_samples.max(1) as f64;
        last_pass = rep.inner_ok && rep.outer_ok && rep.inner_violations == 0 && rep.outer_violations == 0 && rate < MAX_FAILURE_RATE;
        table.push(
            "detail",
            vec![
                ("rung", k.into()),
                ("dist", dist.into()),
                ("lambda", rep.lambda.into()),
                ("r", c.r.into()),
                ("window_radius", c.window_radius.into()),
                ("samples", c.samples.into()),
                ("seed", Cell::Int(seed as i64)),
                ("inner_ok", rep.inner_ok.into()),
                ("outer_ok", rep.outer_ok.into()),
                ("inner_violations", rep.inner_violations.into()),
                ("outer_violations", rep.outer_violations.into()),
                ("newton_failures", rep.newton_failures.into()),
                ("failure_rate", rate.into()),
                ("outer_margin", rep.outer_margin.into()),
                ("inner_margin", rep.inner_margin.into()),
                ("min_feasible_r", min_r.into()),
                ("pass", last_pass.into()),
            ],
        );
        min_rs.push((dist, min_r));
    }
    let values: Vec<f64> = min_rs.iter().map(|m| m.1).collect();
    table.push(
        "summary",
        vec![("pass", last_pass.into()), ("min_r_non_increasing", tail_non_increasing(&values, values.len()).into())],
    );
    let mut chart = LineChart::new("minimal feasible r", "boundary distance", "r").log_axes(true, true);
    chart.add_series("min r", min_rs);
    Ok(RunOutput { table, chart: Some(chart), models: Vec::new() })
}
