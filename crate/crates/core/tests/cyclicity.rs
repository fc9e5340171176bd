use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tricycle::cyclicity::*;
use tricycle::geometry::EnergyLevel;
use tricycle::picard_fuchs::I0P_CENTER;
use tricycle::polyalg::named;
use tricycle::quadrature::QuadOptions;
use tricycle::ratio::w_riccati;
use tricycle::Error;

fn ctx() -> &'static JContext {
    JContext::shared().unwrap()
}

fn lvl(h: f64) -> EnergyLevel {
    EnergyLevel::new(h).unwrap()
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(7)
}

fn random_greek(r: &mut ChaCha8Rng) -> Greek {
    Greek::from_array(std::array::from_fn(|_| r.random_range(-1.0..1.0)))
}

#[test]
fn greek_and_mu_charts_give_the_same_j() {
    let mut r = rng();
    for _ in 0..10 {
        let p = PerturbationParams::from_greek(random_greek(&mut r));
        for h in [-3.5, -2.0, -0.3] {
            let by_greek = ctx().j(h, &p.greek).unwrap();
            let by_mu: f64 = (1..=4).map(|k| p.mu[k - 1] * ctx().jk(k, h).unwrap()).sum();
            assert!((by_greek - by_mu).abs() < 1e-12 * (1.0 + by_mu.abs()), "{by_greek} {by_mu}");
        }
    }
}

#[test]
fn flow_j_matches_quadrature() {
    let mut r = rng();
    let o = QuadOptions::with_tol(1e-12);
    for _ in 0..5 {
        let g = random_greek(&mut r);
        for h in [-3.9, -2.7, -1.1, -0.2] {
            let a = ctx().j(h, &g).unwrap();
            let b = j_quadrature(lvl(h), &g, o).unwrap();
            assert!((a - b).abs() < 1e-10, "{h}: {a} {b}");
        }
    }
}

#[test]
fn derivative_identity_on_a_coarse_grid() {
    let mut r = rng();
    for _ in 0..4 {
        let g = random_greek(&mut r);
        for k in 1..20 {
            let h = -4.0 + 0.2 * k as f64;
            let s = 1e-4;
            let jp = (ctx().j(h + s, &g).unwrap() - ctx().j(h - s, &g).unwrap()) / (2.0 * s);
            let fi = f_eval(h, &g, w_riccati(lvl(h)).unwrap()) * ctx().frame(h).unwrap().di0;
            assert!((jp * 7776.0 * h * (4.0 + h) - fi).abs() <= 1e-5 * fi.abs() + 1e-10, "{h}");
            assert!((ctx().j_prime(h, &g).unwrap() - jp).abs() < 1e-7);
        }
    }
}

#[test]
fn center_values() {
    let g = Greek { lambda: 0.4, sigma: -0.2, gamma: 0.7, kappa: 0.5 };
    let e = 1e-3;
    let j = ctx().j(-4.0 + e, &g).unwrap();
    let lin = j_center(&g) + e * j_prime_center(&g);
    assert!((j - lin).abs() < 1e-5 * e, "{j} {lin}");
    assert!((j_center(&g) - (4.0 * 0.5 - 0.7) / 162.0 * I0P_CENTER).abs() < 1e-15);
    assert_eq!(f_separatrix(&g), -16.0 * (0.4 + 6.0 * 0.7));
}

#[test]
fn ln_squared_growth_at_the_separatrix() {
    let g = Greek { lambda: 1.0, sigma: 0.0, gamma: 0.0, kappa: 0.0 };
    let [a, _, _] = separatrix_model(&ctx().tail, &g);
    assert!((a - f_separatrix(&g) / 124416.0).abs() < 1e-15);
    let h: f64 = -1e-9;
    let l = h.abs().ln();
    let [a, b, c] = separatrix_model(&ctx().tail, &g);
    let model = a * l * l + b * l + c;
    assert!((ctx().j(h, &g).unwrap() - model).abs() < 1e-6 * model.abs());
}

#[test]
fn psi_signs_along_the_ratio() {
    let (p1, p2) = (named::psi1(), named::psi2());
    for k in 1..100 {
        let h = -4.0 + 4.0 * k as f64 / 100.0;
        let w = w_riccati(lvl(h)).unwrap();
        assert!(p1.eval_f64(&[("h", h), ("w", w)]) > 0.0, "{h}");
        assert!(p2.eval_f64(&[("h", h), ("w", w)]) < 0.0, "{h}");
    }
}

#[test]
fn rho_decreases() {
    for gamma in [-2.0, 0.0, 1.5] {
        let mut prev = f64::INFINITY;
        for k in 1..60 {
            let h = -4.0 + 4.0 * k as f64 / 60.0;
            let r = rho_eval(lvl(h), gamma).unwrap();
            assert!(r < prev, "{gamma} {h}");
            prev = r;
        }
    }
}

#[test]
fn ect_normalizations_near_the_center() {
    let h: f64 = -3.999;
    let p = ect_determinants(ctx(), h).unwrap();
    let a = I0P_CENTER;
    let e = h + 4.0;
    let n2 = p.deltas[1] * 1458.0 / (a * a * e * e);
    let n4 = p.deltas[3] * 6377292.0 / a.powi(4);
    assert!((n2 + 1.0).abs() < 1e-2, "{n2}");
    assert!((n4 + 1.0).abs() < 1e-2, "{n4}");
    assert!(!ect_determinants(ctx(), -3.99).unwrap().inconclusive);
}

#[test]
fn ect_window_is_negative() {
    let w = ect_window(ctx(), 80, 2e-3, 1e-6).unwrap();
    assert!(w.all_negative);
    assert_eq!(w.b, -1e-6);
}

#[test]
fn three_prescribed_zeros() {
    let th = find_three_zeros(ctx(), [-3.98, -3.95, -3.9], &ZeroOptions::default()).unwrap();
    assert_eq!(th.report.count, 3);
    for (z, t) in th.report.zeros.iter().zip(th.targets) {
        assert!(z.simple && (z.h - t).abs() < 1e-6);
    }
}

#[test]
fn invalid_targets_are_rejected() {
    let e = find_three_zeros(ctx(), [-2.0, -3.0, -1.0], &ZeroOptions::default());
    assert!(matches!(e, Err(Error::InvalidTargets(_))));
}

#[test]
fn zero_parameters_are_degenerate() {
    let p = PerturbationParams::from_mu([0.0; 4]);
    assert!(matches!(count_zeros(ctx(), &p, &ZeroOptions::default()), Err(Error::DegenerateParams)));
}

#[test]
fn pure_mu1_has_no_zero() {
    let p = PerturbationParams::from_mu([1.0, 0.0, 0.0, 0.0]);
    let r = count_zeros(ctx(), &p, &ZeroOptions::default()).unwrap();
    assert_eq!(r.count, 0);
}

#[test]
fn kappa_and_gamma_zero_give_at_most_two() {
    let mut r = rng();
    for _ in 0..40 {
        let g = Greek { lambda: r.random_range(-1.0..1.0), sigma: r.random_range(-1.0..1.0), gamma: 0.0, kappa: 0.0 };
        let rep = count_zeros(ctx(), &PerturbationParams::from_greek(g), &ZeroOptions::default()).unwrap();
        assert!(rep.count <= 2, "{g:?}: {}", rep.count);
    }
}

#[test]
fn strata() {
    let g = |gamma: f64, lambda: f64| Greek { lambda, sigma: 0.0, gamma, kappa: 1.0 };
    assert_eq!(Stratum::classify(&Greek { kappa: 0.0, ..g(1.0, 1.0) }), Stratum::Kappa0);
    assert_eq!(Stratum::classify(&g(-4.0, 0.0)), Stratum::Kappa1Outer);
    assert_eq!(Stratum::classify(&g(-1.0, 10.0)), Stratum::Kappa1MidF0Neg);
    assert_eq!(Stratum::classify(&g(-1.0, 0.0)), Stratum::Kappa1MidF0NonNeg);
    // scaling by a negative kappa keeps the normalized stratum
    assert_eq!(Stratum::classify(&g(-1.0, 10.0).scaled(-2.0)), Stratum::Kappa1MidF0Neg);
    assert_eq!(Stratum::Kappa1MidF0Neg.predicted_bound(), 2);
}

#[test]
fn scan_is_deterministic_and_bounded() {
    let spec = ScanSpec { samples: 300, ..ScanSpec::default() };
    let a = scan(ctx(), &spec, &ZeroOptions::default()).unwrap();
    let b = scan(ctx(), &spec, &ZeroOptions::default()).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert!(a.global_max <= 3);
    assert!(a.strata.iter().all(|s| s.within_bound));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mu_greek_round_trip(mu in proptest::array::uniform4(-10.0f64..10.0)) {
        let p = PerturbationParams::from_mu(mu);
        let back = PerturbationParams::from_greek(p.greek);
        for k in 0..4 {
            prop_assert!((back.mu[k] - mu[k]).abs() < 1e-12 * (1.0 + mu[k].abs()));
        }
    }

    #[test]
    fn j_is_linear_in_parameters(
        a in proptest::array::uniform4(-1.0f64..1.0),
        b in proptest::array::uniform4(-1.0f64..1.0),
        h in -3.9f64..-0.1,
    ) {
        let (ga, gb) = (Greek::from_array(a), Greek::from_array(b));
        let sum = Greek::from_array(std::array::from_fn(|k| a[k] + b[k]));
        let lhs = ctx().j(h, &sum).unwrap();
        let rhs = ctx().j(h, &ga).unwrap() + ctx().j(h, &gb).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-14);
    }
}
