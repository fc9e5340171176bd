use tricycle::geometry::EnergyLevel;
use tricycle::ode::OdeOptions;
use tricycle::picard_fuchs::{
    pf_flow, pf_residual, second_derivatives, series_center, FlowOptions, FrameCache, SeparatrixFit, I0P_CENTER,
};
use tricycle::quadrature::{abelian_di, frame, QuadOptions};

fn lvl(h: f64) -> EnergyLevel {
    EnergyLevel::new(h).unwrap()
}

#[test]
fn quadrature_frames_satisfy_the_system() {
    let o = QuadOptions::with_tol(1e-12);
    let mut worst: f64 = 0.0;
    for k in 1..200 {
        let h = -4.0 + 4.0 * k as f64 / 200.0;
        worst = worst.max(pf_residual(&frame(lvl(h), o).unwrap()));
    }
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn second_derivatives_match_differences() {
    let o = QuadOptions::with_tol(1e-13);
    let h = -1.7;
    let s = 1e-4;
    let d = |h: f64| {
        let (a, b, c) = abelian_di(lvl(h), o).unwrap();
        [c, b, a]
    };
    let (p, m) = (d(h + s), d(h - s));
    let dd = second_derivatives(h, d(h));
    for k in 0..3 {
        let fd = (p[k] - m[k]) / (2.0 * s);
        assert!((fd - dd[k]).abs() < 1e-6, "{k}: {fd} {}", dd[k]);
    }
}

#[test]
fn center_constant() {
    let (d0, _, _) = abelian_di(lvl(-4.0 + 1e-9), QuadOptions::with_tol(1e-12)).unwrap();
    assert!((d0 - I0P_CENTER).abs() < 1e-5);
}

#[test]
fn center_series_remainder_is_fifth_order() {
    let o = QuadOptions::with_tol(1e-14);
    let err = |e: f64| {
        let q = frame(lvl(-4.0 + e), o).unwrap();
        let s = series_center(lvl(-4.0 + e), 4).unwrap();
        (q.i0 - s.i0).abs()
    };
    let (a, b) = (0.02, 0.2);
    let slope = (err(b) / err(a)).ln() / (b / a).ln();
    assert!(slope > 4.7, "{slope}");
}

#[test]
fn flow_reproduces_quadrature() {
    let cache = FrameCache::build(FlowOptions::default()).unwrap();
    let o = QuadOptions::with_tol(1e-12);
    for k in 0..=76 {
        let h = -3.9 + 0.05 * k as f64;
        let q = frame(lvl(h), o).unwrap();
        let f = cache.frame(lvl(h)).unwrap();
        for (a, b) in f.values().iter().zip(q.values()).chain(f.derivatives().iter().zip(q.derivatives())) {
            assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0), "h={h}: {a} {b}");
        }
    }
}

#[test]
fn single_shot_flow_matches_cache() {
    let seed = series_center(lvl(-3.999), 4).unwrap();
    let a = pf_flow(&seed, lvl(-0.5), OdeOptions::default()).unwrap();
    let q = frame(lvl(-0.5), QuadOptions::with_tol(1e-12)).unwrap();
    assert!((a.i0 - q.i0).abs() < 1e-8);
    assert!((a.di_star - q.di_star).abs() < 1e-8);
}

#[test]
fn separatrix_fit_is_consistent() {
    let fit = SeparatrixFit::fit(QuadOptions::with_tol(1e-13)).unwrap();
    assert!(fit.residual < 1e-5, "{fit:?}");
    assert!((fit.c2() - 3.0 * (fit.c() + 1.0)).abs() < 1e-5, "{fit:?}");
    assert!(fit.c() < 0.0);
    let cache = FrameCache::build(FlowOptions::default()).unwrap().with_separatrix(fit);
    let f = cache.frame(lvl(-1e-8)).unwrap();
    let q = frame(lvl(-1e-8), QuadOptions::with_tol(1e-12)).unwrap();
    assert!((f.di0 - q.di0).abs() < 1e-5);
    assert!((f.i_star - q.i_star).abs() < 1e-6);
}
