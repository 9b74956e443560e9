use proptest::prelude::*;

use super::*;
use crate::curvature::{geodesic, riemann, sectional_from, ScanConfig};
use crate::numerics::fd_directional;
use crate::numerics::linalg::{gram_schmidt, norm};
use crate::numerics::sampling::{in_ball, normal_vec, rng_for, unit_vec, SampleRng};
use crate::smoothing::{g0, linear};

fn bundle(base: BasePreset, n: usize, k: usize, q: QPreset, warp: &str, l: f64) -> ModelBundle {
    BundleConfig { base, n, k, q, q_scale: 0.5, warp: warp.into(), l }.build().unwrap()
}

fn oracle_sectional(b: &ModelBundle, p: &[f64], v: &[f64], e: &TotalVector, f: &TotalVector) -> f64 {
    let point = [p, v].concat();
    let g = b.total_metric(p, v).unwrap();
    let rm = riemann(&b.total_chart(), &point).unwrap();
    sectional_from(&rm, &g, &e.coords(), &f.coords()).unwrap()
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn random_fiber_point(rng: &mut SampleRng, k: usize, r: f64) -> Vec<f64> {
    unit_vec(rng, k).iter().map(|c| c * r).collect()
}

fn presets() -> Vec<ModelBundle> {
    vec![
        bundle(BasePreset::Sphere, 2, 2, QPreset::Varying, "g0", 1.0),
        bundle(BasePreset::Sphere, 2, 4, QPreset::Constant, "g0", 2.0),
        bundle(BasePreset::Sphere, 4, 2, QPreset::Varying, "g0", 0.5),
        bundle(BasePreset::Torus, 2, 4, QPreset::Varying, "sin", 0.5),
    ]
}

#[test]
fn zero_section_metric_is_block_diagonal() {
    let b = bundle(BasePreset::Sphere, 2, 4, QPreset::Varying, "g0", 1.0);
    let p = [0.2, -0.1];
    let g = b.total_metric(&p, &[0.0; 4]).unwrap();
    let gn = b.base.metric(&p).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            let want = match (i < 2, j < 2) {
                (true, true) => gn.get(i, j),
                (false, false) if i == j => 1.0,
                _ => 0.0,
            };
            assert_eq!(g.get(i, j), want);
        }
    }
}

#[test]
fn flat_product_case() {
    let b = ModelBundle::new(base_chart(BasePreset::Torus, 2), 2, connection_preset(QPreset::Zero, 2, 2, 0.0), linear(), 0.0)
        .unwrap();
    let g = b.total_metric(&[0.3, 0.1], &[0.2, -0.4]).unwrap();
    assert!(g.max_abs_diff(&SymMatrix::identity(4)) < 1e-15);
    let e = TotalVector::new(vec![1.0, 0.0], vec![0.3, 0.0]);
    let f = TotalVector::new(vec![0.0, 1.0], vec![0.0, 0.7]);
    assert!(curvature_regular(&b, &[0.3, 0.1], &[0.2, -0.4], &e, &f).unwrap().abs() < 1e-4);
}

#[test]
fn positive_definite_below_critical_radius() {
    let b = bundle(BasePreset::Sphere, 2, 4, QPreset::Varying, "g0", 1.0);
    let mut rng = rng_for(7, 0);
    for _ in 0..200 {
        let p = in_ball(&mut rng, 2, 0.5);
        let v = in_ball(&mut rng, 4, 0.49);
        assert!(sym_eig_min(&b.total_metric(&p, &v).unwrap()) > 0.0);
    }
    let hot = bundle(BasePreset::Sphere, 2, 2, QPreset::Zero, "g0", 16.0);
    assert!(hot.total_metric(&[0.0, 0.0], &[0.25, 0.0]).is_err());
}

#[test]
fn connection_presets_are_antisymmetric() {
    for b in presets() {
        let mut rng = rng_for(1, 0);
        for _ in 0..10 {
            assert!(b.connection_asymmetry(&in_ball(&mut rng, b.n, 1.0)) <= 1e-12);
        }
    }
}

#[test]
fn turn_field_and_lift() {
    let b = bundle(BasePreset::Sphere, 2, 4, QPreset::Varying, "g0", 1.0);
    let zero_q = bundle(BasePreset::Sphere, 2, 4, QPreset::Zero, "g0", 1.0);
    let mut rng = rng_for(9, 0);
    for _ in 0..20 {
        let p = in_ball(&mut rng, 2, 0.5);
        let v = in_ball(&mut rng, 4, 0.4);
        let x = normal_vec(&mut rng, 2);
        assert!(b.vertical_projection(&p, &[0.0; 4], &x).iter().all(|c| *c == 0.0));
        assert!(zero_q.vertical_projection(&p, &v, &x).iter().all(|c| *c == 0.0));
        assert!(dot(&b.vertical_projection(&p, &v, &x), &v).abs() < 1e-14);
        let lift = b.basic_lift(&p, &v, &x);
        assert_eq!(lift.base, x);
        assert_eq!(b.basic_lift(&p, &[0.0; 4], &x).fiber, vec![0.0; 4]);
        let g = b.total_metric(&p, &v).unwrap();
        for _ in 0..20 {
            let a = TotalVector::vertical(normal_vec(&mut rng, 4), 2);
            assert!(g.inner(&lift.coords(), &a.coords()).abs() <= 1e-12);
        }
    }
}

/// Lie bracket of the coordinate lifts `X̂ᵢ`, `X̂ⱼ` by finite differences of
/// their coordinate components.
fn fd_lift_bracket(b: &ModelBundle, point: &[f64], i: usize, j: usize) -> Vec<f64> {
    let n = b.n;
    let field = |a: usize| {
        move |x: &[f64]| -> crate::error::Result<Vec<f64>> {
            let mut e = vec![0.0; n];
            e[a] = 1.0;
            Ok(b.basic_lift(&x[..n], &x[n..], &e).coords())
        }
    };
    let ui = field(i)(point).unwrap();
    let uj = field(j)(point).unwrap();
    let duj = fd_directional(field(j), point, &ui, b.policy).unwrap();
    let dui = fd_directional(field(i), point, &uj, b.policy).unwrap();
    duj.iter().zip(&dui).map(|(a, c)| a - c).collect()
}

#[test]
fn bracket_matches_fd_lie_bracket() {
    for b in presets() {
        let mut rng = rng_for(13, b.k as u64);
        for _ in 0..50 / 4 + 1 {
            let p = in_ball(&mut rng, b.n, 0.5);
            let v = in_ball(&mut rng, b.k, 0.4);
            let fd = fd_lift_bracket(&b, &[p.clone(), v.clone()].concat(), 0, 1);
            assert!(fd[..b.n].iter().all(|c| c.abs() < 1e-9));
            let w = b.bracket_vertical(&p, &v, 0, 1).unwrap();
            for (a, c) in fd[b.n..].iter().zip(&w) {
                assert!((a - c).abs() <= 1e-5, "{a} vs {c}");
            }
        }
    }
}

#[test]
fn bracket_basic_properties() {
    let commuting = bundle(BasePreset::Sphere, 2, 2, QPreset::Constant, "g0", 1.0);
    let w = commuting.bracket_vertical(&[0.1, 0.2], &[0.3, -0.1], 0, 1).unwrap();
    assert!(w.iter().all(|c| c.abs() < 1e-12));
    let b = bundle(BasePreset::Sphere, 2, 4, QPreset::Varying, "g0", 1.0);
    let v = [0.1, 0.2, -0.1, 0.05];
    let w1 = b.bracket_vertical(&[0.1, 0.2], &v, 0, 1).unwrap();
    let v3: Vec<f64> = v.iter().map(|c| 3.0 * c).collect();
    let w3 = b.bracket_vertical(&[0.1, 0.2], &v3, 0, 1).unwrap();
    for (a, c) in w1.iter().zip(&w3) {
        assert!((3.0 * a - c).abs() < 1e-12);
    }
    assert!(norm(&w1) > 1e-3);
}

#[test]
fn radial_derivative_examples() {
    let b = bundle(BasePreset::Sphere, 2, 2, QPreset::Varying, "g0", 1.0);
    let (p, v) = ([0.1, -0.2], [0.12, 0.16]);
    let vert = radial_derivative_check(&b, &p, &v, &FieldKind::Vertical(vec![0.0, 1.0])).unwrap();
    assert!((vert.expected_ratio - 0.88 / 0.192).abs() < 1e-12);
    assert!((vert.measured_ratio - 0.88 / 0.192).abs() < 1e-3);
    assert!(vert.radial_component.abs() < 1e-6);
    assert!(vert.residual < 1e-5);
    let basic = radial_derivative_check(&b, &p, &v, &FieldKind::Basic(vec![1.0, 0.5])).unwrap();
    assert!((basic.measured_ratio + 0.2 / 0.96).abs() < 1e-3);
    assert!(basic.radial_component.abs() < 1e-6);
    assert!(basic.residual < 1e-5);
}

#[test]
fn v_and_w_examples() {
    let g = SymMatrix::identity(3);
    assert!((v_form(&g, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]) - 1.0).abs() < 1e-15);
    assert_eq!(v_form(&g, &[0.3, 0.2, 1.0], &[0.3, 0.2, 1.0]), 0.0);
}

/// Random `A, B ⊥ X, Y` in `ℝ⁵ = ℝ² ⊕ ℝ³`.
fn split_draw(rng: &mut SampleRng) -> [Vec<f64>; 4] {
    let pad = |v: Vec<f64>, front: bool| -> Vec<f64> {
        if front {
            [v, vec![0.0; 3]].concat()
        } else {
            [vec![0.0; 2], v].concat()
        }
    };
    [
        pad(normal_vec(rng, 2), true),
        pad(normal_vec(rng, 2), true),
        pad(normal_vec(rng, 3), false),
        pad(normal_vec(rng, 3), false),
    ]
}

#[test]
fn w_is_nonnegative_and_splits_v() {
    let g = SymMatrix::identity(5);
    let mut rng = rng_for(21, 0);
    for _ in 0..100_000 {
        let [a, b, x, y] = split_draw(&mut rng);
        assert!(w_form(&g, &a, &b, &x, &y) >= -1e-12);
        let ax: Vec<f64> = a.iter().zip(&x).map(|(p, q)| p + q).collect();
        let by: Vec<f64> = b.iter().zip(&y).map(|(p, q)| p + q).collect();
        let lhs = v_form(&g, &ax, &by);
        let rhs = v_form(&g, &a, &b) + v_form(&g, &x, &y) + w_form(&g, &a, &b, &x, &y);
        assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }
    // general position, no orthogonality
    for _ in 0..100_000 {
        let v: Vec<Vec<f64>> = (0..4).map(|_| normal_vec(&mut rng, 4)).collect();
        assert!(w_form(&SymMatrix::identity(4), &v[0], &v[1], &v[2], &v[3]) >= -1e-12);
    }
}

#[test]
fn w_bound_for_orthonormal_sums() {
    let g = SymMatrix::identity(5);
    let mut rng = rng_for(22, 0);
    let mut checked = 0;
    while checked < 100_000 {
        let [a, b, x, y] = split_draw(&mut rng);
        let e: Vec<f64> = a.iter().zip(&x).map(|(p, q)| p + q).collect();
        let f: Vec<f64> = b.iter().zip(&y).map(|(p, q)| p + q).collect();
        let basis = gram_schmidt(&g, &[e, f], 1e-8);
        if basis.len() < 2 {
            continue;
        }
        let (a, x) = (basis[0][..2].to_vec(), basis[0][2..].to_vec());
        let (b, y) = (basis[1][..2].to_vec(), basis[1][2..].to_vec());
        let g2 = SymMatrix::identity(2);
        let g3 = SymMatrix::identity(3);
        let w = g2.inner(&a, &a) * g3.inner(&y, &y) + g2.inner(&b, &b) * g3.inner(&x, &x)
            - 2.0 * g2.inner(&a, &b) * g3.inner(&x, &y);
        let bound = 0.5 * (g2.inner(&a, &a) + g2.inner(&b, &b)) * (g3.inner(&x, &x) + g3.inner(&y, &y));
        assert!(w >= bound - 1e-12, "{w} < {bound}");
        checked += 1;
    }
}

#[test]
fn zero_section_formula() {
    let b = bundle(BasePreset::Sphere, 2, 2, QPreset::Varying, "g0", 1.0);
    let p = [0.1, 0.2];
    let (x, y) = ([0.7, 0.1], [-0.2, 0.9]);
    let only_base = curvature_at_n(&b, &p, &[0.0; 2], &[0.0; 2], &x, &y).unwrap();
    let point = [p[0], p[1], 0.0, 0.0];
    let xv = [x[0], x[1], 0.0, 0.0];
    let yv = [y[0], y[1], 0.0, 0.0];
    let direct = riemann(&b.total_chart(), &point).unwrap().eval(&xv, &yv, &yv, &xv);
    assert!((only_base - direct).abs() < 1e-12);
    let fiber = curvature_at_n(&b, &p, &[1.0, 0.0], &[0.0, 1.0], &[0.0; 2], &[0.0; 2]).unwrap();
    assert!((fiber - 6.0).abs() < 1e-9);
}

#[test]
fn zero_section_formula_matches_oracle() {
    for b in presets().into_iter().filter(|b| b.profile.name() == "g0") {
        let mut rng = rng_for(31, b.n as u64 * 10 + b.k as u64);
        for _ in 0..3 {
            let p = in_ball(&mut rng, b.n, 0.5);
            let (a, bb) = (normal_vec(&mut rng, b.k), normal_vec(&mut rng, b.k));
            let (x, y) = (normal_vec(&mut rng, b.n), normal_vec(&mut rng, b.n));
            let formula = curvature_at_n(&b, &p, &a, &bb, &x, &y).unwrap();
            let oracle = curvature_at_n_oracle(&b, &p, &a, &bb, &x, &y).unwrap();
            assert!(rel_err(formula, oracle) < 1e-3, "{b:?}: {formula} vs {oracle}");
        }
    }
}

#[test]
fn regular_formula_examples() {
    let b = bundle(BasePreset::Sphere, 2, 2, QPreset::Varying, "g0", 1.0);
    let v = [0.2, 0.0];
    let e = TotalVector::vertical(vec![1.0, 0.0], 2);
    let f = TotalVector::vertical(vec![0.0, 1.0], 2);
    let k = curvature_regular(&b, &[0.1, 0.1], &v, &e, &f).unwrap();
    assert!((k - 1.2 / 0.192).abs() < 1e-2, "{k}");
}

#[test]
fn regular_formula_matches_oracle() {
    let mut count = 0;
    for (ci, b) in presets().iter().enumerate() {
        let mut rng = rng_for(42, ci as u64);
        for _ in 0..8 {
            let p = in_ball(&mut rng, b.n, 0.5);
            let r = crate::numerics::sampling::uniform(&mut rng, 0.05, 0.3);
            let v = random_fiber_point(&mut rng, b.k, r);
            let e = TotalVector::new(normal_vec(&mut rng, b.n), normal_vec(&mut rng, b.k));
            let f = TotalVector::new(normal_vec(&mut rng, b.n), normal_vec(&mut rng, b.k));
            let formula = curvature_regular(b, &p, &v, &e, &f).unwrap();
            let oracle = oracle_sectional(b, &p, &v, &e, &f);
            assert!(rel_err(formula, oracle) < 1e-3, "case {ci}: formula {formula} oracle {oracle}");
            count += 1;
        }
    }
    assert!(count >= 30);
}

#[test]
fn m1_examples() {
    let commuting = bundle(BasePreset::Sphere, 2, 2, QPreset::Constant, "g0", 1.0);
    assert!(estimate_m1(&commuting, 50, 0).unwrap().value < 1e-12);
    let b = bundle(BasePreset::Sphere, 2, 4, QPreset::Varying, "linear", 0.0);
    let mut last = 0.0;
    for count in [5, 20, 80] {
        let m = estimate_m1(&b, count, 3).unwrap().value;
        assert!(m >= last);
        last = m;
    }
    assert!(last > 0.0);
}

#[test]
fn select_l_examples() {
    let b = bundle(BasePreset::Sphere, 2, 2, QPreset::Zero, "g0", 0.0);
    let scan = ScanConfig { points: 16, planes_per_point: 4, refine_iterations: 4, seed: 0, threshold: 0.0 };
    let sel = select_l(&b, Some(1.0), &scan, 50).unwrap();
    assert!((sel.l - 1.0).abs() < 1e-12);
    assert!(select_l(&b, Some(7.0), &scan, 50).is_err());
    let flat = bundle(BasePreset::Torus, 2, 2, QPreset::Zero, "g0", 0.0);
    assert!(select_l(&flat, None, &scan, 50).is_err());
}

#[test]
fn selected_l_makes_zero_section_positive() {
    let b = bundle(BasePreset::Sphere, 2, 4, QPreset::Varying, "g0", 0.0);
    let scan = ScanConfig { points: 16, planes_per_point: 4, refine_iterations: 4, seed: 0, threshold: 0.0 };
    let sel = select_l(&b, None, &scan, 200).unwrap();
    let b = b.with_profile(g0(), sel.l);
    let mut rng = rng_for(77, 0);
    for _ in 0..10 {
        let p = in_ball(&mut rng, 2, 0.5);
        let g = b.total_metric(&p, &[0.0; 4]).unwrap();
        for _ in 0..10 {
            let basis = gram_schmidt(&g, &[normal_vec(&mut rng, 6), normal_vec(&mut rng, 6)], 1e-8);
            let (e, f) = (&basis[0], &basis[1]);
            let k = curvature_at_n(&b, &p, &e[2..], &f[2..], &e[..2], &f[..2]).unwrap();
            assert!(k > 0.0, "L = {}: {k}", sel.l);
        }
    }
}

#[test]
fn family_scan_is_positive() {
    let b = BundleConfig {
        base: BasePreset::Sphere,
        n: 2,
        k: 2,
        q: QPreset::Varying,
        q_scale: 0.2,
        warp: "g0".into(),
        l: 0.0,
    }
    .build()
    .unwrap();
    let scan = ScanConfig { points: 24, planes_per_point: 8, refine_iterations: 8, seed: 2, threshold: 0.0 };
    let sel = select_l(&b, None, &scan, 200).unwrap();
    let family = positivity_scan_family(&b, &[0.02, 0.05], sel.l, 0.1 * sel.l.max(1.0), 0.01, &scan).unwrap();
    for r in &family.reports {
        assert!(r.passed, "{}: min {} ({:?})", r.check, r.min_value, r.first_error);
    }
    assert!(family.jet_defect <= 1e-6, "{}", family.jet_defect);
    let empty = positivity_scan_family(&b, &[0.05], sel.l, 1e-4, 0.01, &scan).unwrap();
    assert!(empty.reports[0].empty);
}

#[test]
fn m1_is_independent_of_l_and_warp() {
    let base = bundle(BasePreset::Sphere, 2, 4, QPreset::Varying, "linear", 0.0);
    let other = base.with_profile(g0(), 1.0);
    let a = estimate_m1(&base, 100, 5).unwrap().value;
    let c = estimate_m1(&other, 100, 5).unwrap().value;
    assert!((a - c).abs() <= 1e-6, "{a} vs {c}");
}

#[test]
fn q_round_trip() {
    for b in presets() {
        let p = vec![0.15; b.n];
        let ex = extract_q(&b.total_chart(), b.n, &p).unwrap();
        assert!(ex.asymmetry_defect <= 1e-6);
        for (got, want) in ex.as_dmatrices().iter().zip(b.connection(&p)) {
            assert!((got - want).amax() <= 1e-5);
        }
    }
    let product = bundle(BasePreset::Sphere, 2, 2, QPreset::Zero, "g0", 0.0);
    let ex = extract_q(&product.total_chart(), 2, &[0.1, 0.1]).unwrap();
    assert!(ex.as_dmatrices().iter().all(|m| m.amax() < 1e-9));
    let skewed = ChartMetric::new("skewed", 3, |_| Ok(SymMatrix::from_fn(3, |i, j| if i == j { 1.0 } else { 0.1 })));
    assert!(extract_q(&skewed, 1, &[0.0]).is_err());
}

#[test]
fn lifts_stay_orthogonal_along_rays() {
    let b = bundle(BasePreset::Sphere, 2, 4, QPreset::Varying, "g0", 1.0);
    let mut rng = rng_for(55, 0);
    for _ in 0..10 {
        let p = in_ball(&mut rng, 2, 0.5);
        let dir = unit_vec(&mut rng, 4);
        let x = normal_vec(&mut rng, 2);
        let w = normal_vec(&mut rng, 4);
        for s in [0.05, 0.1, 0.2, 0.3, 0.4] {
            let v: Vec<f64> = dir.iter().map(|c| c * s).collect();
            // the rotation field through w, tangent to the distance spheres
            let a: Vec<f64> = (0..4).map(|i| w[i] * dot(&dir, &v) - dir[i] * dot(&w, &v)).collect();
            let g = b.total_metric(&p, &v).unwrap();
            let inner = g.inner(&b.basic_lift(&p, &v, &x).coords(), &TotalVector::vertical(a, 2).coords());
            assert!(inner.abs() <= 1e-10);
        }
    }
}

#[test]
fn radial_field_commutes_with_rotation_fields() {
    // [∂r, A] for A = S v, S antisymmetric, by finite differences
    let mut rng = rng_for(56, 0);
    let policy = crate::numerics::FdPolicy::default();
    for _ in 0..10 {
        let v = in_ball(&mut rng, 3, 0.4);
        let w = normal_vec(&mut rng, 3);
        let u = normal_vec(&mut rng, 3);
        let s = |x: &[f64]| -> crate::error::Result<Vec<f64>> {
            Ok((0..3).map(|i| (0..3).map(|j| (w[i] * u[j] - u[i] * w[j]) * x[j]).sum()).collect())
        };
        let radial = |x: &[f64]| -> crate::error::Result<Vec<f64>> {
            let r = norm(x);
            Ok(x.iter().map(|c| c / r).collect())
        };
        let a = s(&v).unwrap();
        let dr = radial(&v).unwrap();
        let d_a = fd_directional(s, &v, &dr, policy).unwrap();
        let d_r = fd_directional(radial, &v, &a, policy).unwrap();
        assert!(d_a.iter().zip(&d_r).all(|(p, q)| (p - q).abs() <= 1e-6));
    }
}

#[test]
fn fibers_and_zero_section_are_totally_geodesic() {
    let b = bundle(BasePreset::Sphere, 2, 2, QPreset::Varying, "g0", 1.0);
    let chart = b.total_chart();
    let path = geodesic(&chart, &[0.1, -0.1, 0.1, 0.05], &[0.0, 0.0, 0.05, 0.1], 1.0, 200).unwrap();
    let drift = path.points.iter().map(|x| (x[0] - 0.1).abs().max((x[1] + 0.1).abs())).fold(0.0, f64::max);
    assert!(drift <= 1e-6, "base drift {drift}");
    let path = geodesic(&chart, &[0.1, -0.1, 0.0, 0.0], &[0.3, 0.2, 0.0, 0.0], 1.0, 200).unwrap();
    let drift = path.points.iter().map(|x| x[2].abs().max(x[3].abs())).fold(0.0, f64::max);
    assert!(drift <= 1e-6, "fiber drift {drift}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lift_is_horizontal(
        p in prop::array::uniform2(-0.5f64..0.5),
        v in prop::array::uniform4(-0.2f64..0.2),
        x in prop::array::uniform2(-2.0f64..2.0),
        a in prop::array::uniform4(-2.0f64..2.0),
    ) {
        let b = bundle(BasePreset::Sphere, 2, 4, QPreset::Varying, "g0", 1.0);
        let g = b.total_metric(&p, &v).unwrap();
        let lift = b.basic_lift(&p, &v, &x);
        prop_assert!(g.inner(&lift.coords(), &TotalVector::vertical(a.to_vec(), 2).coords()).abs() <= 1e-12);
        prop_assert!(dot(&b.vertical_projection(&p, &v, &x), &v).abs() <= 1e-13);
    }

    #[test]
    fn w_is_nonnegative(vals in prop::collection::vec(-3.0f64..3.0, 12)) {
        let g = SymMatrix::identity(3);
        prop_assert!(w_form(&g, &vals[0..3], &vals[3..6], &vals[6..9], &vals[9..12]) >= -1e-9);
    }
}

use crate::numerics::linalg::dot;
use crate::numerics::{sym_eig_min, SymMatrix};
use crate::curvature::ChartMetric;
