use tricycle::geometry::EnergyLevel;
use tricycle::quadrature::QuadOptions;
use tricycle::ratio::{
    envelope_check, ratio_point, riccati_rhs, w_center_series, w_derivs, w_direct, w_riccati,
    w_separatrix_asymptote, zeta,
};

fn lvl(h: f64) -> EnergyLevel {
    EnergyLevel::new(h).unwrap()
}

#[test]
fn riccati_flow_matches_quadrature() {
    let o = QuadOptions::with_tol(1e-12);
    let mut worst: f64 = 0.0;
    for k in 1..=50 {
        let h = -4.0 + 4.0 * k as f64 / 51.0;
        worst = worst.max((w_riccati(lvl(h)).unwrap() - w_direct(lvl(h), o).unwrap()).abs());
    }
    assert!(worst < 1e-7, "{worst}");
}

#[test]
fn endpoint_limits() {
    let o = QuadOptions::with_tol(1e-12);
    assert!((w_direct(lvl(-4.0 + 1e-9), o).unwrap() - 1.0).abs() < 1e-8);
    let near0 = w_direct(lvl(-1e-12), o).unwrap();
    assert!((near0 - 3.0).abs() < 0.3 && near0 < 3.0);
    let mid = w_direct(lvl(-2.0), o).unwrap();
    assert!(mid > 4.0 / 3.0 && mid < 2.0);
    let d = 1e-3;
    assert_eq!(w_center_series(-4.0 + d), 1.0 + d / 6.0 + d * d / 108.0 + 7.0 * d * d * d / 5832.0);
}

#[test]
fn separatrix_asymptote_is_approached() {
    // gap to the asymptote is o(1/ln|h|)
    let mut prev = f64::INFINITY;
    for h in [-1e-4, -1e-7, -1e-10] {
        let w = w_riccati(lvl(h)).unwrap();
        let gap = (w - w_separatrix_asymptote(h)).abs() * h.abs().ln().powi(2);
        assert!(gap < prev * 1.5 + 1e-9, "{h}: {gap}");
        prev = gap;
        assert!((w - 3.0).abs() < 6.0 / h.abs().ln().abs() * 1.5);
    }
}

#[test]
fn riccati_residual_of_quadrature_ratio() {
    let o = QuadOptions::with_tol(1e-13);
    for k in 1..20 {
        let h = -4.0 + 0.2 * k as f64;
        let s = 1e-4;
        let fd = (w_direct(lvl(h + s), o).unwrap() - w_direct(lvl(h - s), o).unwrap()) / (2.0 * s);
        let w = w_direct(lvl(h), o).unwrap();
        let res = 3.0 * h * (h + 4.0) * fd - riccati_rhs(h, w);
        assert!(res.abs() < 1e-5, "{h}: {res}");
        // discriminant 4h(h+4) < 0, so the right side never vanishes
        assert!(riccati_rhs(h, w) < 0.0);
    }
}

#[test]
fn derivatives_positive_and_envelope_strict() {
    for k in 1..400 {
        let h = -4.0 + 4.0 * k as f64 / 400.0;
        let p = ratio_point(lvl(h)).unwrap();
        assert!(p.w > 1.0 && p.w < 3.0);
        assert!(p.w1 > 0.0 && p.w2 > 0.0 && p.w3 > 0.0, "{p:?}");
        assert!(zeta(h, p.w) < 0.0);
        let e = envelope_check(h, p.w).unwrap();
        assert!(e.holds && e.tangent_margin > 0.0 && e.chord_margin > 0.0, "{h} {e:?}");
    }
}

#[test]
fn derivative_limits_at_center() {
    let h = lvl(-4.0 + 1e-3);
    let (_, w2, w3) = w_derivs(h, w_riccati(h).unwrap());
    assert!((w2 - 1.0 / 54.0).abs() < 1e-4, "{w2}");
    assert!((w3 - 7.0 / 972.0).abs() < 1e-3, "{w3}");
}

#[test]
fn closed_forms_match_differences_along_the_flow() {
    let h = -1.3;
    let s = 1e-3;
    let w = |h: f64| w_riccati(lvl(h)).unwrap();
    let (w1, w2, w3) = w_derivs(lvl(h), w(h));
    let d1 = (w(h + s) - w(h - s)) / (2.0 * s);
    let d2 = (w(h + s) - 2.0 * w(h) + w(h - s)) / (s * s);
    let d3 = (w(h + 2.0 * s) - 2.0 * w(h + s) + 2.0 * w(h - s) - w(h - 2.0 * s)) / (2.0 * s * s * s);
    assert!((d1 - w1).abs() < 1e-6);
    assert!((d2 - w2).abs() < 1e-5);
    assert!((d3 - w3).abs() < 1e-3 * w3.abs().max(1.0));
}
