use super::{random_direction, random_in_ball, rng, RunOutput};
use crate::config::InvarianceConfig;
use crate::error::Result;
use crate::table::{ModelInfo, ResultTable};
use bergman_core::curvature::sectional_curvature;
use bergman_core::geometry::{Domain, DomainSpec};
use bergman_core::symmetry::{curvature_invariance_check, BallAutomorphism};
use bergman_core::C64;
use nalgebra::DMatrix;
use rand::Rng;

/// Unitary factor of the QR decomposition of a random complex matrix.
fn random_unitary(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> DMatrix<C64> {
    let m = DMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    m.qr().q()
}

pub fn run_invariance(c: &InvarianceConfig, seed: u64) -> Result<RunOutput> {
    let domain = Domain::new(DomainSpec::UnitBall { n: c.n })?;
    let built = c.kernel.build(&domain)?;
    let models = vec![ModelInfo { label: "ball".into(), degree: built.degree, dropped_modes: built.dropped_modes }];
    let mut r = rng(seed, 0);
    let mut table = ResultTable::new(&["index", "seed", "center_norm", "point_norm", "curvature", "discrepancy", "max_discrepancy"]);
    let mut worst: f64 = 0.0;
    for i in 0..c.count {
        let a = random_in_ball(&mut r, c.n, c.max_radius);
        let u = random_unitary(&mut r, c.n);
        let p = random_in_ball(&mut r, c.n, c.max_radius);
        let xi = random_direction(&mut r, c.n);
        let phi = BallAutomorphism::new(a.clone(), u)?;
        let s = sectional_curvature(built.kernel.as_ref(), &p, &xi)?.s;
        let d = curvature_invariance_check(built.kernel.as_ref(), &phi, &p, &xi)?;
        worst = worst.max(d);
        table.push(
            "detail",
            vec![
                ("index", i.into()),
                ("seed", crate::table::Cell::Int(seed as i64)),
                ("center_norm", a.norm().into()),
                ("point_norm", p.norm().into()),
                ("curvature", s.into()),
                ("discrepancy", d.into()),
            ],
        );
    }
    table.push("summary", vec![("max_discrepancy", worst.into())]);
    Ok(RunOutput { table, chart: None, models })
}
