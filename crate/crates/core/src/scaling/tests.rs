use super::*;
use crate::geometry::DomainSpec;
use crate::kernel::{BergmanKernel, ClosedFormKernel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn ball2() -> Domain {
    Domain::new(DomainSpec::UnitBall { n: 2 }).unwrap()
}

fn ellipsoid() -> Domain {
    Domain::new(DomainSpec::Ellipsoid { n: 2, coefficients: vec![1.0, 2.0] }).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> ComplexPoint {
    loop {
        let z = ComplexPoint((0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect());
        if z.norm() < 1.0 {
            return z.scale_real(radius);
        }
    }
}

#[test]
fn frame_sends_ball_point_to_origin() {
    let q = ComplexPoint::basis(2, 0);
    let f = normalize_at_boundary(&ball2(), &q).unwrap();
    assert!(f.apply(&q).norm() < 1e-15);
    // outward normal e_1 goes to -e_1
    let n = f.apply_linear(&ComplexPoint::basis(2, 0));
    assert!((&n - &ComplexPoint::new(vec![c(-1.0, 0.0), c(0.0, 0.0)])).norm() < 1e-14);
}

#[test]
fn frame_preserves_boundary_distance() {
    let dom = ellipsoid();
    let q = ComplexPoint::new(vec![c(0.0, 0.0), c(std::f64::consts::FRAC_1_SQRT_2, 0.0)]);
    let f = normalize_at_boundary(&dom, &q).unwrap();
    let moved = Domain::new(DomainSpec::Shifted { n: 2, inner: Box::new(dom.spec().clone()), motion: f.clone() }).unwrap();
    let p = ComplexPoint::new(vec![c(0.2, 0.1), c(0.3, -0.2)]);
    let d0 = boundary_distance(&dom, &p).unwrap().distance;
    let d1 = boundary_distance(&moved, &f.apply(&p)).unwrap().distance;
    assert!((d0 - d1).abs() < 1e-12);
}

#[test]
fn ellipsoid_normal_matches_difference_quotient() {
    let dom = ellipsoid();
    let q = ComplexPoint::new(vec![c(0.0, 0.0), c(std::f64::consts::FRAC_1_SQRT_2, 0.0)]);
    let f = normalize_at_boundary(&dom, &q).unwrap();
    // Real gradient of rho by central differences.
    let h = 1e-6;
    let xs = q.to_real();
    let grad: Vec<f64> = (0..xs.len())
        .map(|k| {
            let mut a = xs.clone();
            let mut b = xs.clone();
            a[k] += h;
            b[k] -= h;
            (dom.rho(&ComplexPoint::from_real(&a)) - dom.rho(&ComplexPoint::from_real(&b))) / (2.0 * h)
        })
        .collect();
    let n = ComplexPoint::from_real(&grad).normalized().unwrap();
    let img = f.apply_linear(&n);
    assert!((&img - &ComplexPoint::new(vec![c(-1.0, 0.0), c(0.0, 0.0)])).norm() < 1e-6);
}

#[test]
fn ball_shear_is_pure_scaling() {
    let q = ComplexPoint::basis(2, 0);
    let f = normalize_at_boundary(&ball2(), &q).unwrap();
    let s = quadratic_shear(&ball2(), &f).unwrap();
    assert!(s.quad.iter().all(|x| x.norm() < 1e-14));
    let det = determinant(&s.jacobian(&ComplexPoint::zeros(2)));
    assert!((det - c(2.0, 0.0)).norm() < 1e-14);
}

/// Wirtinger second derivatives of `f` at 0 by central differences with
/// step `h`: returns (pure `d_i d_j`, mixed `d_i dbar_j`).
fn wirtinger_hessian(f: &dyn Fn(&ComplexPoint) -> f64, n: usize, h: f64) -> (DMatrix<C64>, DMatrix<C64>) {
    let e = |k: usize, s: f64| {
        let mut x = vec![0.0; 2 * n];
        x[k] = s;
        x
    };
    let at = |v: Vec<f64>| f(&ComplexPoint::from_real(&v));
    let second = |a: usize, b: usize| -> f64 {
        let add = |u: &Vec<f64>, v: &Vec<f64>| u.iter().zip(v).map(|(x, y)| x + y).collect::<Vec<_>>();
        (at(add(&e(a, h), &e(b, h))) - at(add(&e(a, h), &e(b, -h))) - at(add(&e(a, -h), &e(b, h)))
            + at(add(&e(a, -h), &e(b, -h))))
            / (4.0 * h * h)
    };
    let mut pure = DMatrix::zeros(n, n);
    let mut mixed = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
            let fxx = second(xi, xj);
            let fyy = second(yi, yj);
            let fxy = second(xi, yj);
            let fyx = second(yi, xj);
            pure[(i, j)] = c(fxx - fyy, -(fxy + fyx)) * 0.25;
            mixed[(i, j)] = c(fxx + fyy, fxy - fyx) * 0.25;
        }
    }
    (pure, mixed)
}

#[test]
fn shear_removes_pure_terms() {
    let dom = Domain::new(DomainSpec::perturbed_ball(2, 0.2)).unwrap();
    let q = dom
        .boundary_along_ray(&ComplexPoint::zeros(2), &ComplexPoint::new(vec![c(0.8, 0.3), c(0.2, -0.4)]))
        .unwrap();
    let f = normalize_at_boundary(&dom, &q).unwrap();
    let s = quadratic_shear(&dom, &f).unwrap();
    assert!(s.quad.iter().any(|x| x.norm() > 1e-3), "test needs a non-trivial Hessian");
    let g = s.gradient_norm;
    let pulled = |w: &ComplexPoint| KAPPA / g * dom.rho(&f.apply_inverse(&s.inverse(w).unwrap()));
    let (pure, mixed) = wirtinger_hessian(&pulled, 2, 1e-2);
    assert!(pure.iter().all(|x| x.norm() < 1e-3), "{pure}");
    // tangential Levi form normalized to 1
    assert!((mixed[(1, 1)] - c(1.0, 0.0)).norm() < 1e-3);
}

#[test]
fn chain_sends_anchor_to_origin() {
    let p = ComplexPoint::new(vec![c(0.99, 0.0), c(0.0, 0.0)]);
    let ch = build_chain(&ball2(), &p).unwrap();
    assert!(ch.apply(&p).norm() < 1e-10);
    assert!(ch.jacobian_determinant(&p).norm() > 0.0);
}

#[test]
fn lambda_halves_with_distance() {
    let lam: Vec<f64> = (4..9)
        .map(|nu| {
            let p = ComplexPoint::new(vec![c(1.0 - 0.5f64.powi(nu), 0.0), c(0.0, 0.0)]);
            build_chain(&ball2(), &p).unwrap().lambda
        })
        .collect();
    for w in lam.windows(2) {
        assert!((w[1] / w[0] - 0.5).abs() < 1e-9);
    }
}

#[test]
fn ambiguous_foot_rejected() {
    let dom = Domain::new(DomainSpec::Polydisc { n: 2, radii: vec![1.0, 1.0] }).unwrap();
    let p = ComplexPoint::new(vec![c(0.95, 0.0), c(0.95, 0.0)]);
    assert!(matches!(build_chain(&dom, &p), Err(Error::AmbiguousBoundaryPoint(_))));
}

#[test]
fn stages_compose() {
    let dom = ellipsoid();
    let p = ComplexPoint::new(vec![c(0.9, 0.05), c(0.1, 0.0)]);
    let ch = build_chain(&dom, &p).unwrap();
    let z = ComplexPoint::new(vec![c(0.8, 0.1), c(0.2, 0.1)]);
    let st = ch.stages(&z);
    let manual = cayley(&ch.dilate(&ch.shear.apply(&ch.frame.apply(&z))));
    assert!((&manual - &st.cayley).norm() < 1e-12);
    assert!((&ch.apply(&z) - &st.cayley).norm() < 1e-12);
}

#[test]
fn chain_is_holomorphic_and_jacobian_exact() {
    let dom = ellipsoid();
    let p = ComplexPoint::new(vec![c(0.9, 0.05), c(0.1, 0.0)]);
    let ch = build_chain(&dom, &p).unwrap();
    let z = ComplexPoint::new(vec![c(0.85, 0.02), c(0.12, -0.03)]);
    let h = 1e-6;
    let j = ch.jacobian(&z);
    for k in 0..2 {
        let mut ex = ComplexPoint::zeros(2);
        ex[k] = c(h, 0.0);
        let mut ey = ComplexPoint::zeros(2);
        ey[k] = c(0.0, h);
        let dx = (&ch.apply(&(&z + &ex)) - &ch.apply(&(&z - &ex))).scale_real(0.5 / h);
        let dy = (&ch.apply(&(&z + &ey)) - &ch.apply(&(&z - &ey))).scale_real(0.5 / h);
        for i in 0..2 {
            // d/dzbar = (d/dx + i d/dy)/2, d/dz = (d/dx - i d/dy)/2
            let dbar = (dx[i] + c(0.0, 1.0) * dy[i]) * 0.5;
            let dz = (dx[i] - c(0.0, 1.0) * dy[i]) * 0.5;
            let scale = 1.0 + j[(i, k)].norm();
            assert!(dbar.norm() < 1e-8 * scale, "CR residual {}", dbar.norm());
            assert!((dz - j[(i, k)]).norm() < 1e-6 * scale);
        }
    }
}

#[test]
fn inverse_round_trip() {
    let dom = ellipsoid();
    let p = ComplexPoint::new(vec![c(0.97, 0.0), c(0.0, 0.0)]);
    let ch = build_chain(&dom, &p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let y = random_point(&mut rng, 2, 0.8);
        let z = ch.inverse(&y).unwrap();
        assert!((&ch.apply(&z) - &y).norm() < 1e-10);
    }
}

#[test]
fn cayley_maps_siegel_into_ball() {
    assert!(cayley(&ComplexPoint::basis(3, 0)).norm() < 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut n = 0;
    while n < 100_000 {
        // {Re u_1 > |u|^2} is the ball of radius 1/2 around (1/2, 0).
        let u = ComplexPoint::new(vec![
            c(rng.gen_range(0.0..1.0), rng.gen_range(-0.5..0.5)),
            c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)),
        ]);
        if u[0].re > u.norm_sqr() {
            assert!(cayley(&u).norm() < 1.0);
            n += 1;
        }
    }
    // Points of the larger Siegel domain {Re u_1 > |u'|^2}.
    for _ in 0..10_000 {
        let t = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let re = t.norm_sqr() + rng.gen_range(1e-6..20.0);
        let u = ComplexPoint::new(vec![c(re, rng.gen_range(-20.0..20.0)), t]);
        assert!(cayley(&u).norm() < 1.0);
    }
}

#[test]
fn dilation_preserves_siegel_domain() {
    // {Re u_1 > |u'|^2} is invariant under (u_1/l, u'/sqrt l).
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let u = ComplexPoint::new(vec![
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        ]);
        let l: f64 = rng.gen_range(1e-4..10.0);
        let v = ComplexPoint::new(vec![u[0] / l, u[1] / l.sqrt()]);
        let inside = |w: &ComplexPoint| w[0].re > w[1].norm_sqr();
        assert_eq!(inside(&u), inside(&v));
    }
}

#[test]
fn ball_sandwich_near_boundary() {
    let dom = ball2();
    let p = ComplexPoint::new(vec![c(1.0 - 1e-3, 0.0), c(0.0, 0.0)]);
    let ch = build_chain(&dom, &p).unwrap();
    let rep = sandwich_check(&ch, &dom, DEFAULT_WINDOW_RADIUS, 0.2, 2000, 0).unwrap();
    assert!(rep.inner_ok && rep.outer_ok, "{rep:?}");
    let weak = sandwich_check(&ch, &dom, DEFAULT_WINDOW_RADIUS, 0.99, 500, 0).unwrap();
    assert!(weak.inner_ok && weak.outer_ok);
}

#[test]
fn squeeze_examples() {
    let s = QuadricSqueezeSets::new(0.5).unwrap();
    let z = ComplexPoint::new(vec![c(0.1, 0.0), c(0.0, 0.0)]);
    assert!(s.contains(SqueezeSet::E, &z) && s.contains(SqueezeSet::S, &z));
    let o = ComplexPoint::zeros(2);
    assert!(!s.contains(SqueezeSet::E, &o) && !s.contains(SqueezeSet::S, &o));
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100_000 {
        let z = random_point(&mut rng, 2, 1.0);
        if s.contains(SqueezeSet::S, &z) {
            assert!(s.contains(SqueezeSet::E, &z));
        }
    }
}

#[test]
fn transported_ball_kernel_matches_closed_form_gap() {
    // sigma(B) tends to B, so the transported kernel approaches the ball kernel.
    let dom = ball2();
    let base: std::sync::Arc<dyn crate::kernel::BergmanKernel> = std::sync::Arc::new(ClosedFormKernel::ball(2));
    let x = ComplexPoint::new(vec![c(0.2, 0.1), c(-0.1, 0.3)]);
    let gap = |nu: i32| {
        let p = ComplexPoint::new(vec![c(1.0 - 0.5f64.powi(nu), 0.0), c(0.0, 0.0)]);
        let q = ComplexPoint::basis(2, 0);
        let k = TransportedKernel::new(base.clone(), build_chain_at(&dom, &p, &q).unwrap()).unwrap();
        (k.eval(&x, &x).unwrap() - base.eval(&x, &x).unwrap()).norm()
    };
    assert!(gap(8) < 0.5 * gap(3));
}
