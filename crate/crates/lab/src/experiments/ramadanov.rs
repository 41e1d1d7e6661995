use super::{boundary_point, RunOutput};
use crate::config::RamadanovConfig;
use crate::error::Result;
use crate::plot::LineChart;
use crate::table::{ModelInfo, ResultTable};
use bergman_core::curvature::{normal_and_tangent, resolve_ladder, ScanSchedule};
use bergman_core::geometry::{factorial, ComplexPoint, Domain};
use bergman_core::kernel::{ramadanov_gap, BergmanKernel, ClosedFormKernel};
use bergman_core::scaling::{build_chain_at, TransportedKernel};
use bergman_core::C64;
use std::f64::consts::PI;

/// `m` points of the closed ball of radius 1/2 spread over radii and
/// phases, paired with each other.
pub fn pair_grid(n: usize, m: usize) -> Vec<(ComplexPoint, ComplexPoint)> {
    let pts: Vec<ComplexPoint> = (0..m)
        .map(|k| {
            let radius = if m == 1 { 0.0 } else { 0.5 * k as f64 / (m - 1) as f64 };
            let mut dir = ComplexPoint::new((0..n).map(|i| C64::from_polar(1.0 + i as f64, (k * (i + 1)) as f64)).collect());
            dir = dir.normalized().expect("non-zero direction");
            dir.scale_real(radius)
        })
        .collect();
    pts.iter().flat_map(|a| pts.iter().map(move |b| (a.clone(), b.clone()))).collect()
}

pub fn run_ramadanov(c: &RamadanovConfig) -> Result<RunOutput> {
    let domain = Domain::new(c.domain.clone())?;
    let n = domain.dim();
    let built = c.kernel.build(&domain)?;
    let models = vec![ModelInfo { label: "omega".into(), degree: built.degree, dropped_modes: built.dropped_modes }];
    let q = boundary_point(&domain, c.boundary_point.as_ref())?;
    let (normal, _) = normal_and_tangent(&domain, &q)?;
    let targets: Vec<f64> = c.nu.iter().map(|&v| 0.5f64.powi(v as i32)).collect();
    let offsets = resolve_ladder(&domain, &q, &normal, &ScanSchedule::Distances { targets: targets.clone() })?;
    let limit = ClosedFormKernel::ball(n);
    let pairs = pair_grid(n, c.grid_points);
    let origin = ComplexPoint::zeros(n);
    let k00 = factorial(n as u32) / PI.powi(n as i32);

    let mut table = ResultTable::new(&["nu", "dist", "lambda", "pairs", "gap", "origin_gap", "ratio", "halved"]);
    let mut gaps = Vec::new();
    for ((&nu, &dist), &s) in c.nu.iter().zip(&targets).zip(&offsets) {
        let p = &q + &normal.scale_real(s);
        let chain = build_chain_at(&domain, &p, &q)?;
        let lambda = chain.lambda;
        let k = TransportedKernel::new(built.kernel.clone(), chain)?;
        let gap = ramadanov_gap(&k, &limit, &pairs)?;
        let origin_gap = (k.eval(&origin, &origin)? - C64::new(k00, 0.0)).norm();
        table.push(
            "detail",
            vec![
                ("nu", nu.into()),
                ("dist", dist.into()),
                ("lambda", lambda.into()),
                ("pairs", pairs.len().into()),
                ("gap", gap.into()),
                ("origin_gap", origin_gap.into()),
            ],
        );
        gaps.push((dist, gap));
    }
    if gaps.len() > 1 {
        let first = gaps[0].1;
        let last = gaps[gaps.len() - 1].1;
        table.push("summary", vec![("ratio", (last / first).into()), ("halved", (last <= 0.5 * first).into())]);
    }
    let mut chart = LineChart::new("kernel gap along the scaling sequence", "boundary distance", "sup gap").log_axes(true, true);
    chart.add_series("sup gap", gaps);
    Ok(RunOutput { table, chart: Some(chart), models })
}
