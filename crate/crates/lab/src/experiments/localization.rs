use super::{boundary_point, tail_non_increasing, RunOutput};
use crate::config::LocalizationConfig;
use crate::error::Result;
use crate::plot::LineChart;
use crate::table::{ModelInfo, ResultTable};
use bergman_core::curvature::{localization_ratio, normal_and_tangent, sectional_curvature};
use bergman_core::geometry::{boundary_distance, Domain};

/// Rungs entering the trend check.
pub const TREND_RUNGS: usize = 3;

pub fn run_localization(c: &LocalizationConfig) -> Result<RunOutput> {
    let full = Domain::new(c.full.clone())?;
    let local = Domain::new(c.localized.clone())?;
    let kf = c.full_kernel.build(&full)?;
    let kl = c.localized_kernel.build(&local)?;
    let models = vec![
        ModelInfo { label: "full".into(), degree: kf.degree, dropped_modes: kf.dropped_modes },
        ModelInfo { label: "localized".into(), degree: kl.degree, dropped_modes: kl.dropped_modes },
    ];
    let q = boundary_point(&full, c.boundary_point.as_ref())?;
    let (normal, tangent) = normal_and_tangent(&full, &q)?;
    let mut table = ResultTable::new(&[
        "rung",
        "s",
        "dist",
        "direction",
        "curvature_full",
        "curvature_localized",
        "ratio",
        "flag",
        "threshold",
        "final_abs_ratio",
        "tail_non_increasing",
        "pass",
    ]);
    let mut chart = LineChart::new("localization ratio", "ray offset", "|ratio|").log_axes(true, true);
    for (j, dir) in c.directions.iter().enumerate() {
        let xi = dir.resolve(&normal, &tangent);
        let label = dir.label(j);
        let mut ratios = Vec::new();
        for (k, &s) in c.offsets.iter().enumerate() {
            let p = &q + &normal.scale_real(s);
            let dist = boundary_distance(&full, &p)?.distance;
            let sf = sectional_curvature(kf.kernel.as_ref(), &p, &xi).map(|v| v.s);
            let sl = sectional_curvature(kl.kernel.as_ref(), &p, &xi).map(|v| v.s);
            let ratio = localization_ratio(kf.kernel.as_ref(), kl.kernel.as_ref(), &p, &xi);
            let flag = match (&sf, &sl, &ratio) {
                (Ok(_), Ok(_), Ok(_)) => String::new(),
                (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => e.to_string(),
            };
            let ratio = ratio.unwrap_or(f64::NAN);
            table.push(
                "detail",
                vec![
                    ("rung", k.into()),
                    ("s", s.into()),
                    ("dist", dist.into()),
                    ("direction", label.clone().into()),
                    ("curvature_full", sf.ok().into()),
                    ("curvature_localized", sl.ok().into()),
                    ("ratio", ratio.into()),
                    ("flag", flag.into()),
                ],
            );
            ratios.push((s, ratio));
        }
        let values: Vec<f64> = ratios.iter().map(|r| r.1).collect();
        let last = values.last().copied().unwrap_or(f64::NAN).abs();
        let trend = tail_non_increasing(&values, TREND_RUNGS);
        table.push(
            "direction",
            vec![
                ("direction", label.clone().into()),
                ("threshold", c.threshold.into()),
                ("final_abs_ratio", last.into()),
                ("tail_non_increasing", trend.into()),
                ("pass", (trend && last < c.threshold).into()),
            ],
        );
        chart.add_series(label, ratios.into_iter().map(|(s, r)| (s, r.abs())).collect());
    }
    Ok(RunOutput { table, chart: Some(chart), models })
}
