use super::{rng, RunOutput};
use crate::config::OrbitConfig;
use crate::error::Result;
use crate::table::ResultTable;
use bergman_core::geometry::{boundary_distance, ComplexPoint, Domain};
use bergman_core::symmetry::{average_exhaustion, orbit_boundary_distance};
use rand::Rng;

/// `-ln(-rho)`, an exhaustion of the domain.
pub fn exhaustion(domain: &Domain) -> impl Fn(&ComplexPoint) -> f64 + '_ {
    move |z| -(-domain.rho(z)).ln()
}

fn random_interior(r: &mut rand_chacha::ChaCha8Rng, domain: &Domain) -> Result<ComplexPoint> {
    let bb = domain.bounding_box();
    loop {
        let xs: Vec<f64> = bb.lo.iter().zip(&bb.hi).map(|(&lo, &hi)| r.gen_range(lo..hi)).collect();
        let z = ComplexPoint::from_real(&xs);
        if domain.contains(&z)? {
            return Ok(z);
        }
    }
}

pub fn run_orbit(c: &OrbitConfig, seed: u64) -> Result<RunOutput> {
    let domain = Domain::new(c.domain.clone())?;
    let rho = exhaustion(&domain);
    let mut table = ResultTable::new(&[
        "group",
        "order",
        "point",
        "seed",
        "rho_hat",
        "discrepancy",
        "orbit_distance",
        "boundary_distance",
        "max_discrepancy",
    ]);
    for (gi, choice) in c.groups.iter().enumerate() {
        let group = choice.build(domain.dim())?;
        let label = choice.label();
        let mut r = rng(seed, gi as u64);
        let points: Vec<ComplexPoint> = (0..c.points).map(|_| random_interior(&mut r, &domain)).collect::<Result<_>>()?;
        group.check_preserves(&domain, &points)?;
        let mut worst: f64 = 0.0;
        for (k, z) in points.iter().enumerate() {
            let base = average_exhaustion(&group, &rho, z)?;
            let mut disc: f64 = 0.0;
            for g in 0..group.order() {
                disc = disc.max((average_exhaustion(&group, &rho, &group.apply(g, z))? - base).abs());
            }
            worst = worst.max(disc);
            table.push(
                "detail",
                vec![
                    ("group", label.clone().into()),
                    ("order", group.order().into()),
                    ("point", k.into()),
                    ("seed", crate::table::Cell::Int(seed as i64)),
                    ("rho_hat", base.into()),
                    ("discrepancy", disc.into()),
                    ("orbit_distance", orbit_boundary_distance(&domain, &group, z)?.into()),
                    ("boundary_distance", boundary_distance(&domain, z)?.distance.into()),
                ],
            );
        }
        table.push(
            "group",
            vec![("group", label.into()), ("order", group.order().into()), ("max_discrepancy", worst.into())],
        );
    }
    Ok(RunOutput { table, chart: None, models: Vec::new() })
}
