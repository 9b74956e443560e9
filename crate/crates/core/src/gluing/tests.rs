use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::curvature::{charts, ChartMetric};
use crate::error::GeomError;
use crate::numerics::linalg::norm;
use crate::numerics::sampling::{in_ball, rng_for, uniform};
use crate::numerics::{fd_derivative, sym_eig_min, FdPolicy, SymMatrix};

const SCHEDULE: [f64; 4] = [0.2, 0.1, 0.05, 0.02];

#[test]
fn smooth_step_shape() {
    assert_eq!(smooth_step_jet(0.5), [1.0, 0.0, 0.0]);
    assert_eq!(smooth_step_jet(1.0), [1.0, 0.0, 0.0]);
    assert_eq!(smooth_step_jet(2.0), [0.0, 0.0, 0.0]);
    assert!((smooth_step_jet(1.5)[0] - 0.5).abs() < 1e-15);
    let mut last = 1.0;
    for i in 1..1000 {
        let y = 1.0 + i as f64 / 1000.0;
        let [f, d1, _] = smooth_step_jet(y);
        assert!(f <= last && d1 <= 0.0);
        last = f;
    }
    let policy = FdPolicy::new(1e-4, 2).unwrap();
    for y in [1.1, 1.3, 1.5, 1.8, 1.95] {
        let [_, d1, d2] = smooth_step_jet(y);
        let fd1 = fd_derivative(|t| Ok(smooth_step_jet(t)[0]), y, 1, policy).unwrap();
        let fd2 = fd_derivative(|t| Ok(smooth_step_jet(t)[1]), y, 1, policy).unwrap();
        assert!((d1 - fd1).abs() < 1e-7 * (1.0 + d1.abs()), "{y}: {d1} vs {fd1}");
        assert!((d2 - fd2).abs() < 1e-6 * (1.0 + d2.abs()), "{y}: {d2} vs {fd2}");
    }
    assert!(step_bound() > 1.0 && step_bound() < 100.0);
}

#[test]
fn cutoff_properties() {
    for eps in SCHEDULE.into_iter().chain([1.0, 5.0]) {
        let c = build_cutoff(eps).unwrap();
        assert!(c.ln_delta1 < c.delta2.ln() && c.delta2 <= eps);
        assert!(c.lambda > 0.0 && c.lambda < 1.0);
        assert!(2.0 * c.n_bound * c.lambda * (1.0 + c.lambda) <= eps * (1.0 + 1e-12));
        let (lo, hi) = (c.ln_delta1 - 5.0, (3.0 * eps).ln());
        for i in 0..=5000 {
            let t = lo + (hi - lo) * i as f64 / 5000.0;
            let x = t.exp();
            let [f, d1, d2] = c.scaled_jet(x);
            assert!((0.0..=1.0).contains(&f));
            assert!(d1.abs() <= eps && d2.abs() <= eps);
            if t <= c.ln_delta1 {
                assert_eq!(c.phi(x), 1.0);
            }
            if x >= c.delta2 {
                assert_eq!(f, 0.0);
            }
        }
    }
    assert!(matches!(build_cutoff(0.0), Err(GeomError::Precondition(_))));
    assert!(build_cutoff(-1.0).is_err());
}

#[test]
fn cutoff_derivatives_match_fd() {
    let c = build_cutoff(0.2).unwrap();
    for x in [1e-20, 1e-10, 1e-5, 1e-3, 0.05] {
        let [_, d1, d2] = c.jet(x);
        let policy = FdPolicy::new(1e-3 * x, 2).unwrap();
        let fd1 = fd_derivative(|t| Ok(c.phi(t)), x, 1, policy).unwrap();
        let fd2 = fd_derivative(|t| Ok(c.jet(t)[1]), x, 1, policy).unwrap();
        assert!((x * (d1 - fd1)).abs() < 1e-9, "{x}: {d1} vs {fd1}");
        assert!((x * x * (d2 - fd2)).abs() < 1e-8, "{x}: {d2} vs {fd2}");
    }
}

#[test]
fn radial_cutoff_bounds() {
    for (eps, n) in [(0.2, 1), (0.2, 3), (0.05, 2), (0.02, 5)] {
        let c = build_cutoff(eps).unwrap();
        let rep = radial_cutoff_check(&c, n, 1000, 3).unwrap();
        assert!(rep.gradient_term <= eps + 1e-6, "{rep:?}");
        assert!(rep.hessian_term <= 2.0 * eps + 1e-5, "{rep:?}");
        assert!(rep.passed && rep.gradient_term > 0.0);
    }
    assert!(radial_cutoff_check(&build_cutoff(0.1).unwrap(), 0, 10, 0).is_err());
}

fn chart_with_fiber(dim: usize, n: usize, bump: f64) -> ChartMetric {
    ChartMetric::new("test", dim, move |x: &[f64]| {
        let r2: f64 = x[n..].iter().map(|v| v * v).sum();
        Ok(SymMatrix::from_fn(dim, |i, j| {
            let base = if i == j { 1.0 + 0.1 * x[0] * x[0] } else { 0.0 };
            base + bump * r2 * (1.0 + (i + j) as f64 * 0.1)
        }))
    })
}

fn fiber_radius(n: usize) -> RadialFn {
    Arc::new(move |x: &[f64]| norm(&x[n..]))
}

#[test]
fn glue_examples() {
    let m0 = chart_with_fiber(3, 1, 0.3);
    let m1 = chart_with_fiber(3, 1, 0.8);
    let zero = vec![vec![0.1, 0.0, 0.0], vec![-0.2, 0.0, 0.0]];
    let c = build_cutoff(0.2).unwrap();
    let same = glue_metrics(&m0, &m0, fiber_radius(1), &c, &zero).unwrap();
    let glued = glue_metrics(&m0, &m1, fiber_radius(1), &c, &zero).unwrap();
    let mut rng = rng_for(4, 0);
    for _ in 0..50 {
        let x = in_ball(&mut rng, 3, 0.5);
        assert_eq!(same.metric(&x).unwrap(), m0.metric(&x).unwrap());
    }
    let far = [0.1, 0.25, 0.0];
    assert_eq!(glued.metric(&far).unwrap(), m0.metric(&far).unwrap());
    let near = [0.1, 1e-32, 0.0];
    assert_eq!(glued.metric(&near).unwrap(), m1.metric(&near).unwrap());
    let mid = [0.1, 1e-3, 0.0];
    let s = c.phi(1e-3);
    assert!(s > 0.0 && s < 1.0);
    let want = m0.metric(&mid).unwrap().combine(1.0 - s, &m1.metric(&mid).unwrap(), s);
    assert!(glued.metric(&mid).unwrap().max_abs_diff(&want) < 1e-15);
}

#[test]
fn mismatched_jets_are_rejected() {
    let m0 = chart_with_fiber(3, 1, 0.3);
    let tilted = ChartMetric::new("tilted", 3, |x: &[f64]| {
        let r2 = x[1] * x[1] + x[2] * x[2];
        Ok(SymMatrix::from_fn(3, |i, j| {
            let base = if i == j { 1.0 + 0.1 * x[0] * x[0] + 0.01 * x[1] } else { 0.0 };
            base + 0.3 * r2 * (1.0 + (i + j) as f64 * 0.1)
        }))
    });
    let c = build_cutoff(0.1).unwrap();
    let err = glue_metrics(&m0, &tilted, fiber_radius(1), &c, &[vec![0.0, 0.0, 0.0]]).unwrap_err();
    assert!(matches!(err, GeomError::JetMismatch { .. }), "{err}");
    let sphere = charts::round_sphere(3, 1.0);
    assert!(glue_metrics(&m0, &sphere, fiber_radius(1), &c, &[vec![0.0, 0.0, 0.0]]).is_err());
}

#[test]
fn blend_weight_is_radial() {
    let m0 = chart_with_fiber(4, 2, 0.3);
    let m1 = chart_with_fiber(4, 2, 0.8);
    let c = build_cutoff(0.2).unwrap();
    let glued = glue_metrics(&m0, &m1, fiber_radius(2), &c, &[vec![0.0; 4]]).unwrap();
    let weight = |x: &[f64]| {
        let (a, b, g) = (m0.metric(x).unwrap(), m1.metric(x).unwrap(), glued.metric(x).unwrap());
        (g.get(0, 1) - a.get(0, 1)) / (b.get(0, 1) - a.get(0, 1))
    };
    let mut rng = rng_for(8, 0);
    for _ in 0..20 {
        let r = uniform(&mut rng, -12.0, -2.0).exp();
        let t = uniform(&mut rng, 0.0, std::f64::consts::TAU);
        let p = [0.1, -0.2, r, 0.0];
        let q = [0.1, -0.2, -r, 0.0];
        assert_eq!(c.phi(norm(&p[2..])), c.phi(norm(&q[2..])));
        let rot = [0.1, -0.2, r * t.cos(), r * t.sin()];
        assert!((weight(&p) - weight(&rot)).abs() < 1e-6, "{} vs {}", weight(&p), weight(&rot));
    }
}

#[test]
fn convexity_at_zero_section() {
    let sm = scene_metrics(&GluingScene::default()).unwrap();
    for p in &sm.zero_points {
        for s in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let d = convexity_defect(&sm.m0, &sm.m1, p, s).unwrap();
            assert!(d <= 1e-4, "s = {s}: {d}");
        }
    }
    assert!(sm.l1 > sm.l0 && sm.l0 > 0.0);
}

#[test]
fn glued_metric_is_positive_definite() {
    let sm = scene_metrics(&GluingScene::default()).unwrap();
    let mut rng = rng_for(12, 0);
    for eps in SCHEDULE {
        let c = build_cutoff(eps).unwrap();
        let glued = glue_metrics(&sm.m0, &sm.m1, sm.r.clone(), &c, &sm.zero_points).unwrap();
        for _ in 0..100 {
            let mut x = in_ball(&mut rng, sm.n, 0.5);
            x.extend(in_ball(&mut rng, sm.k, eps));
            assert!(sym_eig_min(&glued.metric(&x).unwrap()) > 0.0);
        }
    }
}

#[test]
fn canonical_scene_glues_positively() {
    let rep = glued_positivity_demo(&GluingScene::default()).unwrap();
    assert!(rep.passed, "{rep:?}");
    let eps = rep.succeeded_eps.unwrap();
    assert!(SCHEDULE.contains(&eps));
    let last = rep.attempts.last().unwrap();
    assert!(last.report.min_value > 0.0 && !last.report.empty);
}

#[test]
fn blend_defect_shrinks_with_eps() {
    let sm = scene_metrics(&GluingScene::default()).unwrap();
    let mut x = vec![0.1, 0.2];
    x.extend([0.006, 0.008]);
    let mut last = f64::INFINITY;
    for eps in SCHEDULE {
        let c = build_cutoff(eps).unwrap();
        let glued = glue_metrics(&sm.m0, &sm.m1, sm.r.clone(), &c, &sm.zero_points).unwrap();
        let local = |m: &ChartMetric| m.clone().with_policy(FdPolicy::new(1e-3, 2).unwrap());
        let d = blend_defect(&local(&glued), &local(&sm.m0), &local(&sm.m1), &sm.r, &c, &x).unwrap();
        assert!(d <= last + 1e-9, "ε = {eps}: {d} after {last}");
        last = d;
    }
}

#[test]
fn empty_annulus_is_flagged() {
    let sm = scene_metrics(&GluingScene::default()).unwrap();
    let rep = annulus_scan("empty", &sm.m0, sm.n, sm.k, (0.1, 0.05), &Default::default());
    assert!(rep.empty && !rep.passed);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn radial_invariance_is_exact(
        x in prop::collection::vec(-0.1f64..0.1, 4),
        signs in prop::collection::vec(prop::bool::ANY, 4),
        eps_idx in 0usize..4,
    ) {
        let c = build_cutoff(SCHEDULE[eps_idx]).unwrap();
        let mut y: Vec<f64> = x.iter().zip(&signs).map(|(v, s)| if *s { -v } else { *v }).collect();
        y.swap(0, 1);
        prop_assert_eq!(c.phi(norm(&x)), c.phi(norm(&y)));
    }

    #[test]
    fn cutoff_stays_in_unit_interval(t in -700.0f64..2.0, eps_idx in 0usize..4) {
        let c = build_cutoff(SCHEDULE[eps_idx]).unwrap();
        let [f, d1, d2] = c.scaled_jet(t.exp());
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!(d1 <= 0.0);
        prop_assert!(d1.abs() <= c.eps && d2.abs() <= c.eps);
    }
}
