use amlab::arithmetic::{Angle, ContinuedFraction};
use amlab::denjoy::{build_denjoy, gap_decay_fit, CantorPoint, DenjoyModel, HoleSpec, PointKind};
use proptest::prelude::*;

fn cyc(d: f64) -> f64 {
    let r = d.rem_euclid(1.0);
    r.min(1.0 - r)
}

fn one_hole() -> DenjoyModel {
    let cf = ContinuedFraction::golden(60).unwrap();
    build_denjoy(&cf, &[HoleSpec::geometric(Angle::zero(), 1.0 / 3.0, 0.5, 200)], 0.0).unwrap()
}

fn two_hole(cantor_mass: f64) -> DenjoyModel {
    let cf = ContinuedFraction::golden(60).unwrap();
    let holes = [
        HoleSpec::geometric(Angle::zero(), 1.0, 0.5, 100),
        HoleSpec::geometric(Angle::rational(1, 2).unwrap(), 1.0, 0.6, 100),
    ];
    build_denjoy(&cf, &holes, cantor_mass).unwrap()
}

#[test]
fn measure_zero_model_masses_and_disjointness() {
    let m = one_hole();
    assert!((m.total_gap_mass() - 1.0).abs() < 1e-12);
    let mut gaps = m.gaps().to_vec();
    gaps.sort_by(|a, b| a.left.total_cmp(&b.left));
    assert!(gaps[0].left.abs() < 1e-15);
    for w in gaps.windows(2) {
        assert!(w[1].left >= w[0].right() - 1e-15);
    }
    assert!((gaps.last().unwrap().right() - 1.0).abs() < 1e-12);
    // lengths keep the geometric profile after normalization
    let l = m.gap_lengths(0);
    assert!((l[201].1 / l[200].1 - 0.5).abs() < 1e-12);
}

#[test]
fn holeless_model_is_the_rotation() {
    let cf = ContinuedFraction::golden(60).unwrap();
    let m = build_denjoy(&cf, &[], 1.0).unwrap();
    for i in 0..100 {
        let th = i as f64 / 100.0 + 0.003;
        let p = m.semiconj_h_inv(th);
        assert!((p.x - th).abs() < 1e-15);
        assert!((m.semiconj_h(&p) - th).abs() < 1e-15);
        let image = m.denjoy_map(&p);
        assert!(cyc(image.x - th - cf.value()) < 1e-14);
    }
}

#[test]
fn invalid_models_are_rejected() {
    let cf = ContinuedFraction::golden(60).unwrap();
    let beta = Angle::from_dd(cf.rotation().alpha_dd().mul(amlab::arithmetic::Dd::from_f64(3.0)).frac(), 1e-30);
    let same_orbit = [HoleSpec::geometric(Angle::zero(), 1.0, 0.5, 50), HoleSpec::geometric(beta, 1.0, 0.5, 50)];
    assert_eq!(build_denjoy(&cf, &same_orbit, 0.0).unwrap_err().kind(), "invalid-holes");
    let hole = [HoleSpec::geometric(Angle::zero(), 1.0, 0.5, 50)];
    assert_eq!(build_denjoy(&cf, &hole, 1.5).unwrap_err().kind(), "invalid-mass");
    assert_eq!(build_denjoy(&cf, &[], 0.5).unwrap_err().kind(), "invalid-mass");
}

#[test]
fn two_hole_model_builds_with_both_projections() {
    let m = two_hole(0.0);
    assert_eq!(m.gap(0, 0).unwrap().theta, 0.0);
    assert_eq!(m.gap(1, 0).unwrap().theta, 0.5);
    // the difference of projections does not depend on the base point
    let shifted = m.rebased(&Angle::rational(1, 10).unwrap()).unwrap();
    let d0 = m.gap(1, 0).unwrap().theta - m.gap(0, 0).unwrap().theta;
    let d1 = shifted.gap(1, 0).unwrap().theta - shifted.gap(0, 0).unwrap().theta;
    assert!(cyc(d0 - d1) < 1e-15);
    assert_eq!(shifted.gap_lengths(1), m.gap_lengths(1));
}

#[test]
fn endpoints_and_sections() {
    for m in [one_hole(), two_hole(0.0), two_hole(0.3)] {
        for j in 0..m.holes().len() {
            let g = *m.gap(j, 0).unwrap();
            if m.cantor_mass() > 0.0 {
                // with zero Cantor mass the right endpoint is also the next gap's left endpoint
                let right = m.point_at(g.right());
                assert!(cyc(m.semiconj_h(&right) - g.theta) < 1e-15);
            }
            let section = m.semiconj_h_inv(g.theta);
            assert!(cyc(section.x - g.right()) < 1e-15);
            // right endpoint of gap k goes to the right endpoint of gap k+1
            for k in [-5i64, 0, 7] {
                let p = m.semiconj_h_inv(m.gap(j, k).unwrap().theta);
                assert!(cyc(m.denjoy_map(&p).x - m.gap(j, k + 1).unwrap().right()) < 1e-14);
                let left = m.gap_point(j, k, 0.0);
                assert!(cyc(m.denjoy_map(&left).x - m.gap(j, k + 1).unwrap().left) < 1e-15);
            }
        }
    }
}

#[test]
fn staircase_inverse_brackets_cantor_points() {
    let m = two_hole(0.3);
    for i in 0..1000 {
        let x = (i as f64 + 0.5) / 1000.0;
        let p = m.point_at(x);
        if let PointKind::Cantor { theta } = p.kind {
            let below = m.staircase(theta - 1e-13);
            let at = m.staircase(theta);
            assert!(below <= x + 1e-12 && x <= at + 1e-12, "x = {x}, θ = {theta}");
        }
    }
}

#[test]
fn section_is_exact_on_a_grid() {
    for m in [one_hole(), two_hole(0.0), two_hole(0.3)] {
        for i in 0..1000 {
            let th = i as f64 / 1000.0;
            assert_eq!(m.semiconj_h(&m.semiconj_h_inv(th)), th);
        }
    }
}

#[test]
fn invariant_measure_integrals() {
    let m = one_hole();
    assert!((m.integrate(|_| 1.0) - 1.0).abs() < 1e-12);
    let g = m.gap(0, 3).unwrap();
    let a = m.invariant_measure_cdf(&m.gap_point(0, 3, 0.0));
    let b = m.invariant_measure_cdf(&m.gap_point(0, 3, 0.9));
    assert_eq!(a, b);
    assert_eq!(a, g.theta);
    // ∫x dμ = 1 − ∫h(x) dx, and h is constant on every gap
    let exact: f64 = 1.0 - m.gaps().iter().map(|g| g.length * g.theta).sum::<f64>();
    assert!((m.integrate(|x| x) - exact).abs() < 1e-6);
    // independent Riemann sums of h at two resolutions approach the same value
    let riemann = |n: usize| 1.0 - (0..n).map(|i| m.semiconj_h(&m.point_at((i as f64 + 0.5) / n as f64))).sum::<f64>() / n as f64;
    let (coarse, fine) = (riemann(20_000), riemann(200_000));
    assert!((fine - exact).abs() < (coarse - exact).abs().max(1e-5));
    assert!((fine - exact).abs() < 1e-4);
}

#[test]
fn gaps_wander_for_a_thousand_iterates() {
    for m in [one_hole(), two_hole(0.0)] {
        let g = *m.gap(0, 0).unwrap();
        for t in [0.0, 0.25, 0.5, 0.99] {
            let p = m.gap_point(0, 0, t);
            for n in 1..=1000 {
                let y = m.iterate(&p, n).x;
                assert!(!(y > g.left && y < g.right()), "iterate {n} returns into the gap");
            }
        }
    }
}

#[test]
fn gap_decay_fit_examples() {
    let exact: Vec<(i64, f64)> = (-20..=20).map(|k: i64| (k, 2f64.powi(-(k.abs() as i32)))).collect();
    let fit = gap_decay_fit(&exact).unwrap();
    assert!((fit.delta_est - 0.5).abs() < 1e-12);
    assert!((fit.r2 - 1.0).abs() < 1e-12);
    assert!((fit.c_est - 1.0).abs() < 1e-12);

    let poly: Vec<(i64, f64)> = (10..=1000).map(|k: i64| (k, 1.0 / (1.0 + (k * k) as f64))).collect();
    let fit = gap_decay_fit(&poly).unwrap();
    assert!(fit.delta_est > 0.99, "Δ = {}", fit.delta_est);
    assert!(fit.r2 < 0.9, "r² = {}", fit.r2);

    assert_eq!(gap_decay_fit(&exact[..5]).unwrap_err().kind(), "invalid-input");
    let mut bad = exact.clone();
    bad[3].1 = 0.0;
    assert_eq!(gap_decay_fit(&bad).unwrap_err().kind(), "invalid-input");
}

fn sample_point(m: &DenjoyModel, x: f64, gap: Option<(usize, i64, f64)>) -> CantorPoint {
    match gap {
        Some((j, k, t)) => m.gap_point(j, k, t),
        None => m.point_at(x),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn conjugacy_residual(x in 0.0f64..1.0, j in 0usize..2, k in -90i64..90, t in 0.0f64..1.0, on_gap in any::<bool>(), mass in prop_oneof![Just(0.0), Just(0.3)]) {
        let m = two_hole(mass);
        let p = sample_point(&m, x, on_gap.then_some((j, k, t)));
        let image = m.denjoy_map(&p);
        prop_assert!(cyc(m.semiconj_h(&image) - m.semiconj_h(&p) - m.alpha()) < 1e-12);
    }

    #[test]
    fn section_round_trip(th in 0.0f64..1.0) {
        let m = two_hole(0.3);
        prop_assert_eq!(m.semiconj_h(&m.semiconj_h_inv(th)), th);
    }

    #[test]
    fn map_preserves_cyclic_order(mut xs in prop::array::uniform3(0.0f64..1.0), mass in prop_oneof![Just(0.0), Just(0.3)]) {
        let m = two_hole(mass);
        xs.sort_by(f64::total_cmp);
        let img: Vec<f64> = xs.iter().map(|&x| m.denjoy_map(&m.point_at(x)).x).collect();
        let fwd = |a: f64, b: f64| {
            let d = (b - a).rem_euclid(1.0);
            if d > 1.0 - 1e-12 { 0.0 } else { d }
        };
        // a ≤ b ≤ c cyclically ⇒ f(a) ≤ f(b) ≤ f(c) cyclically
        prop_assert!(fwd(img[0], img[1]) <= fwd(img[0], img[2]) + 1e-12);
    }

    #[test]
    fn staircase_is_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let m = two_hole(0.3);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(m.staircase(lo) <= m.staircase(hi));
        prop_assert!(m.staircase(hi) <= 1.0);
    }
}
