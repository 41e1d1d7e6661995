//! Acceptance criteria. Runs as a plain binary so that one PASS/FAIL line per
//! criterion is always printed; exits non-zero if any criterion fails.

use bergman_core::curvature::sectional_curvature;
use bergman_core::geometry::{Domain, DomainSpec, SamplePlan};
use bergman_core::kernel::{build_kernel_model, BasisSpec, ClosedFormKernel};
use bergman_core::linalg::PIVOT_THRESHOLD;
use bergman_lab::config::{Experiment, KernelSpec};
use bergman_lab::experiments::{random_direction, random_in_ball, rng};
use bergman_lab::table::Cell;
use bergman_lab::{oracle, run_config, ExperimentConfig, ResultTable};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

fn config(name: &str) -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(format!("{name}.json"));
    ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn table(cfg: &ExperimentConfig, threads: Option<usize>) -> ResultTable {
    run_config(cfg, threads).unwrap_or_else(|e| panic!("{}: {e}", cfg.name)).0.table
}

fn real(t: &ResultTable, row: &[Cell], col: &str) -> f64 {
    t.get(row, col).as_real().unwrap_or(f64::NAN)
}

fn flag(t: &ResultTable, row: &[Cell], col: &str) -> bool {
    t.get(row, col).as_bool().unwrap_or(false)
}

/// Worst case over all domains of a Klembeck table, per rung index.
fn worst_by_rung(t: &ResultTable) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for row in t.rows_of("rung") {
        let k = real(t, row, "rung") as usize;
        let w = real(t, row, "worst");
        if out.len() <= k {
            out.resize(k + 1, f64::NEG_INFINITY);
        }
        out[k] = if out[k].is_nan() || w.is_nan() { f64::NAN } else { out[k].max(w) };
    }
    out
}

fn c1_ball_constant() -> Outcome {
    let disc = oracle::check(&ClosedFormKernel::ball(1), 50, 0.9, 1).expect("disc oracle");
    let ball = oracle::check(&ClosedFormKernel::ball(2), 50, 0.9, 2).expect("ball oracle");
    Outcome {
        pass: disc.max_error < 1e-8 && ball.max_error < 1e-8,
        detail: format!("max error disc {:.2e}, B^2 {:.2e}", disc.max_error, ball.max_error),
    }
}

fn c2_truncated_model() -> Outcome {
    let domain = Domain::new(DomainSpec::UnitBall { n: 2 }).unwrap();
    let m = build_kernel_model(&domain, &BasisSpec::new(2, 12), &SamplePlan::product(64, 64), PIVOT_THRESHOLD).unwrap();
    let mut r = rng(12, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let p = random_in_ball(&mut r, 2, 0.4);
        let xi = random_direction(&mut r, 2);
        let s = sectional_curvature(&m, &p, &xi).unwrap().s;
        worst = worst.max((s + 4.0 / 3.0).abs());
    }
    Outcome { pass: worst < 1e-3, detail: format!("worst |S + 4/3| = {worst:.3e} at d = 12") }
}

fn c3_klembeck_trend() -> Outcome {
    let w12 = worst_by_rung(&table(&config("klembeck_ellipsoid"), None));
    let w16 = worst_by_rung(&table(&config("klembeck_ellipsoid_oracle"), None));
    let k = w12.len() - 1;
    let decreasing = w12[k] < w12[k - 1];
    let rel = (w12[k] - w16[k]).abs() / w16[k].abs();
    Outcome {
        pass: decreasing && rel <= 0.25,
        detail: format!(
            "worst-case d=12 {:.4} -> {:.4} -> {:.4}; d=16 at final rung {:.4}; relative gap {:.3}",
            w12[0], w12[1], w12[2], w16[k], rel
        ),
    }
}

fn c4_stability() -> Outcome {
    let t = table(&config("stability_perturbed_ball"), None);
    let stars: Vec<String> = t
        .rows_of("domain")
        .map(|row| format!("t={} d*={}", real(&t, row, "t"), real(&t, row, "delta_star")))
        .collect();
    let summary = t.rows_of("summary").next().expect("summary row");
    Outcome {
        pass: flag(&t, summary, "pass"),
        detail: format!("{}; min {} vs base {}", stars.join(", "), real(&t, summary, "min_delta_star"), real(&t, summary, "base_delta_star")),
    }
}

fn c5_ramadanov() -> Outcome {
    let t = table(&config("ramadanov_ball"), None);
    let gaps: Vec<f64> = t.rows_of("detail").map(|r| real(&t, r, "gap")).collect();
    let summary = t.rows_of("summary").next().expect("summary row");
    Outcome {
        pass: flag(&t, summary, "halved"),
        detail: format!("gap nu=3 {:.3e}, nu=8 {:.3e}, ratio {:.3}", gaps[0], gaps[gaps.len() - 1], real(&t, summary, "ratio")),
    }
}

fn c6_sandwich() -> Outcome {
    let t = table(&config("sandwich_ellipsoid"), None);
    let last = t.rows_of("detail").last().expect("detail rows");
    Outcome {
        pass: flag(&t, last, "pass"),
        detail: format!(
            "final dist {:e}: inner {} outer {}, violations {}/{}, newton failure rate {:.2e}",
            real(&t, last, "dist"),
            flag(&t, last, "inner_ok"),
            flag(&t, last, "outer_ok"),
            real(&t, last, "inner_violations"),
            real(&t, last, "outer_violations"),
            real(&t, last, "failure_rate")
        ),
    }
}

fn c7_invariance() -> Outcome {
    let t = table(&config("invariance_ball"), None);
    let summary = t.rows_of("summary").next().expect("summary row");
    let worst = real(&t, summary, "max_discrepancy");
    Outcome { pass: worst < 1e-8, detail: format!("max discrepancy {worst:.3e} over 50 triples") }
}

fn direction_row<'a>(t: &'a ResultTable, dir: &str) -> &'a [Cell] {
    t.rows_of("direction").find(|r| t.get(r, "direction").as_text() == Some(dir)).expect("direction row")
}

fn ratios(t: &ResultTable, dir: &str) -> String {
    t.rows_of("detail")
        .filter(|r| t.get(r, "direction").as_text() == Some(dir))
        .map(|r| format!("{:.4}", real(t, r, "ratio")))
        .collect::<Vec<_>>()
        .join(", ")
}

fn c8_localization() -> Outcome {
    let t = table(&config("localization_ball"), None);
    let oracle = table(&config("localization_ball_oracle"), None);
    let row = direction_row(&t, "tangent");
    let oracle_row = direction_row(&oracle, "tangent");
    let oracle_final = real(&oracle, oracle_row, "final_abs_ratio");
    let threshold = real(&t, row, "threshold");
    Outcome {
        pass: flag(&t, row, "pass") && oracle_final < threshold,
        detail: format!(
            "tangent ratios d=12 [{}], d=16 [{}]; normal ratios d=12 [{}] (not gated)",
            ratios(&t, "tangent"),
            ratios(&oracle, "tangent"),
            ratios(&t, "normal")
        ),
    }
}

fn c9_exhaustion() -> Outcome {
    let t = table(&config("orbit_ellipsoid"), None);
    let mut parts = Vec::new();
    let mut pass = true;
    let mut orders = Vec::new();
    for row in t.rows_of("group") {
        let order = real(&t, row, "order") as usize;
        let d = real(&t, row, "max_discrepancy");
        parts.push(format!("order {order}: {d:.2e}"));
        if [2, 4, 8].contains(&order) {
            orders.push(order);
            pass &= d < 1e-12;
        }
    }
    orders.sort_unstable();
    Outcome { pass: pass && orders == [2, 4, 8], detail: parts.join(", ") }
}

/// Largest relative difference between numeric cells of two CSV texts, or
/// infinity when the layouts differ.
fn csv_distance(a: &str, b: &str) -> f64 {
    let (la, lb): (Vec<&str>, Vec<&str>) = (a.lines().collect(), b.lines().collect());
    if la.len() != lb.len() {
        return f64::INFINITY;
    }
    let mut worst: f64 = 0.0;
    for (x, y) in la.iter().zip(&lb) {
        let (cx, cy): (Vec<&str>, Vec<&str>) = (x.split(',').collect(), y.split(',').collect());
        if cx.len() != cy.len() {
            return f64::INFINITY;
        }
        for (p, q) in cx.iter().zip(&cy) {
            if p == q {
                continue;
            }
            match (p.parse::<f64>(), q.parse::<f64>()) {
                (Ok(u), Ok(v)) => worst = worst.max((u - v).abs() / u.abs().max(v.abs()).max(f64::MIN_POSITIVE)),
                _ => return f64::INFINITY,
            }
        }
    }
    worst
}

fn c10_determinism() -> Outcome {
    let mut stability = config("stability_perturbed_ball");
    if let Experiment::Stability(s) = &mut stability.experiment {
        // smaller Gram sample so the single-thread reruns stay quick
        s.kernel = KernelSpec::Model { degree: 8, plan: SamplePlan::quasi_mc(40_000, 7), tau: PIVOT_THRESHOLD };
    }
    let configs = vec![
        config("klembeck_ellipsoid"),
        stability,
        config("ramadanov_ball"),
        config("sandwich_ellipsoid"),
        config("invariance_ball"),
        config("orbit_ellipsoid"),
    ];
    let mut identical = 0;
    let mut worst_threads: f64 = 0.0;
    for cfg in &configs {
        let first = table(cfg, Some(1)).to_csv();
        let second = table(cfg, Some(1)).to_csv();
        if first == second {
            identical += 1;
        }
        worst_threads = worst_threads.max(csv_distance(&first, &table(cfg, Some(4)).to_csv()));
    }
    Outcome {
        pass: identical == configs.len() && worst_threads <= 1e-12,
        detail: format!(
            "{identical}/{} experiments byte-identical with one thread; 4-thread max relative cell difference {worst_threads:.1e}",
            configs.len()
        ),
    }
}

type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("ball curvature constant", c1_ball_constant, Some(Duration::from_secs(5))),
        ("truncated-model consistency", c2_truncated_model, Some(Duration::from_secs(120))),
        ("klembeck trend", c3_klembeck_trend, Some(Duration::from_secs(600))),
        ("stability sweep", c4_stability, Some(Duration::from_secs(900))),
        ("ramadanov convergence", c5_ramadanov, Some(Duration::from_secs(300))),
        ("sandwich inclusions", c6_sandwich, Some(Duration::from_secs(300))),
        ("biholomorphic invariance", c7_invariance, Some(Duration::from_secs(10))),
        ("localization ratio", c8_localization, None),
        ("invariant exhaustion", c9_exhaustion, None),
        ("determinism", c10_determinism, None),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let in_time = limit.map_or(true, |l| elapsed <= l);
        let pass = out.pass && in_time;
        if !pass {
            failed += 1;
        }
        let budget = limit.map_or(String::new(), |l| format!(" / limit {}s", l.as_secs()));
        println!(
            "criterion {:>2} {:<28} {} ({}; {:.2}s{budget})",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        println!("all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
