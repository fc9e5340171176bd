use tricycle::geometry::{oval_extent, EnergyLevel};
use tricycle::quadrature::{
    abelian_di, abelian_di_index, abelian_i, abelian_iij, abelian_istar, frame, j1_line, j31_area, original_j,
    JIndex, QuadOptions,
};

fn lvl(h: f64) -> EnergyLevel {
    EnergyLevel::new(h).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

// Reference values from a 30-digit adaptive quadrature (mpmath, tanh-sinh on
// the sin^2-substituted integrals with endpoints split at the roots).
const H2_I0: f64 = -3.88066433884468580;
const H2_I2: f64 = -4.60641894070709952;
const H2_ISTAR: f64 = -0.778539284310108657;
const H2_DI0: f64 = -2.10327315798818137;
const H2_DI2: f64 = -2.91299153636146748;
const H2_DISTAR: f64 = -0.904285137459840915;

#[test]
fn reference_values_at_minus_two() {
    let f = frame(lvl(-2.0), QuadOptions::with_tol(1e-12)).unwrap();
    assert!(rel(f.i0, H2_I0) < 1e-12);
    assert!(rel(f.i2, H2_I2) < 1e-12);
    assert!(rel(f.i_star, H2_ISTAR) < 1e-12);
    assert!(rel(f.di0, H2_DI0) < 1e-12);
    assert!(rel(f.di2, H2_DI2) < 1e-12);
    assert!(rel(f.di_star, H2_DISTAR) < 1e-12);
}

#[test]
fn near_separatrix_values() {
    // same oracle at h = -1e-6 and -1e-4
    let o = QuadOptions::with_tol(1e-12);
    let f = frame(lvl(-1e-6), o).unwrap();
    assert!(rel(f.i0, -8.99999025117888) < 1e-12);
    assert!(rel(f.i2, -13.4999737535373) < 1e-12);
    assert!(rel(f.i_star, -5.99993811859503) < 1e-12);
    let f = frame(lvl(-1e-4), o).unwrap();
    assert!(rel(f.i0, -8.99925537476830) < 1e-12);
    assert!(rel(f.i2, -13.4980661294685) < 1e-12);
    assert!(rel(f.i_star, -5.99645139942827) < 1e-12);
}

#[test]
fn i1_equals_i0() {
    for h in [-3.9, -2.5, -1.0, -0.01] {
        let o = QuadOptions::default();
        let a = abelian_i(0, lvl(h), o).unwrap();
        let b = abelian_i(1, lvl(h), o).unwrap();
        assert!(rel(b, a) < 1e-10, "{h}");
    }
}

#[test]
fn limits_at_separatrix() {
    let o = QuadOptions::with_tol(1e-12);
    let f = frame(lvl(-1e-10), o).unwrap();
    assert!((f.i0 + 9.0).abs() < 1e-7);
    assert!((f.i2 + 13.5).abs() < 1e-7);
    assert!((f.i_star + 6.0).abs() < 1e-7);
}

#[test]
fn derivative_matches_richardson_difference() {
    let o = QuadOptions::with_tol(1e-13);
    let i0 = |h: f64| abelian_i(0, lvl(h), o).unwrap();
    let d = |s: f64| (i0(-2.0 + s) - i0(-2.0 - s)) / (2.0 * s);
    let step = 1e-3;
    let rich = (4.0 * d(step / 2.0) - d(step)) / 3.0;
    let (d0, _, _) = abelian_di(lvl(-2.0), o).unwrap();
    assert!((rich - d0).abs() < 1e-6, "{rich} {d0}");
    assert!(d0 < 0.0);
}

#[test]
fn recursion_identity_with_negative_index() {
    // (2k+6) I_{k+1} = 6(2k+3) I_k - 18k I_{k-1} - (2k-3) h I_{k-2}
    let o = QuadOptions::with_tol(1e-12);
    for h in [-3.7, -2.0, -0.6, -0.05] {
        let i = |k: i32| abelian_i(k, lvl(h), o).unwrap();
        for k in 1..=3 {
            let kf = k as f64;
            let lhs = (2.0 * kf + 6.0) * i(k + 1);
            let rhs = 6.0 * (2.0 * kf + 3.0) * i(k) - 18.0 * kf * i(k - 1) - (2.0 * kf - 3.0) * h * i(k - 2);
            assert!((lhs - rhs).abs() <= 1e-8 * lhs.abs(), "h={h} k={k}: {lhs} {rhs}");
        }
    }
}

#[test]
fn mixed_moment_identity() {
    // I_{0,3}/3 = 9 I_{0,1} - 12 I_{1,1} + 3 I_{2,1}
    let o = QuadOptions::with_tol(1e-12);
    for h in [-3.5, -1.5, -0.2] {
        let i03 = abelian_iij(0, 3, lvl(h), o).unwrap();
        let rhs = 9.0 * abelian_i(0, lvl(h), o).unwrap() - 12.0 * abelian_i(1, lvl(h), o).unwrap()
            + 3.0 * abelian_i(2, lvl(h), o).unwrap();
        assert!((i03 / 3.0 - rhs).abs() <= 1e-8 * rhs.abs(), "{h}");
    }
}

#[test]
fn orientation_and_region_convention() {
    let o = QuadOptions::with_tol(1e-10);
    for h in [-3.6, -2.0, -0.4] {
        let area = original_j(JIndex::J1, lvl(h), o).unwrap();
        let line = j1_line(lvl(h), o).unwrap();
        let i0 = abelian_i(0, lvl(h), o).unwrap();
        assert!(area < 0.0);
        assert!(rel(line, area) < 1e-8, "{line} {area}");
        assert!(rel(area, 2.0 / 27.0 * i0) < 1e-8);
    }
}

fn lemma_j(k: JIndex, h: f64) -> f64 {
    let f = frame(lvl(h), QuadOptions::with_tol(1e-12)).unwrap();
    match k {
        JIndex::J1 => 2.0 / 27.0 * f.i0,
        JIndex::J2 => 2.0 / (27.0 * h) * ((h + 18.0) * f.i0 - 12.0 * f.i2),
        JIndex::J3 => ((h - 12.0) * f.i0 + 24.0 * f.i2 - 36.0 * f.i_star) / (18.0 * h),
        JIndex::J4 => {
            ((19.0 * h + 702.0) * f.i0 - 324.0 * f.i2) / (10368.0 * h)
                + ((-3888.0 - 324.0 * h + 7.0 * h * h) * f.di0 + 216.0 * (6.0 + h) * f.di2) / (20736.0 * h)
        }
    }
}

#[test]
fn original_integrals_match_reductions() {
    let o = QuadOptions::with_tol(1e-9);
    for h in [-3.5, -2.0, -0.5] {
        for k in [JIndex::J1, JIndex::J2, JIndex::J3, JIndex::J4] {
            let direct = original_j(k, lvl(h), o).unwrap();
            let reduced = lemma_j(k, h);
            assert!(rel(direct, reduced) < 1e-6, "h={h} {k:?}: {direct} {reduced}");
        }
    }
}

#[test]
fn j4_line_is_a_moment_of_the_oval() {
    // J4 = h^2 I'_{-2}/648
    let o = QuadOptions::with_tol(1e-12);
    for h in [-3.0, -2.0, -0.5] {
        let a = original_j(JIndex::J4, lvl(h), o).unwrap();
        let b = h * h * abelian_di_index(-2, lvl(h), o).unwrap() / 648.0;
        assert!(rel(a, b) < 1e-10, "{a} {b}");
    }
}

#[test]
fn j31_printed_forms() {
    let o = QuadOptions::with_tol(1e-10);
    for h in [-3.0, -1.2] {
        let f = frame(lvl(h), QuadOptions::with_tol(1e-12)).unwrap();
        let im1 = abelian_i(-1, lvl(h), QuadOptions::with_tol(1e-12)).unwrap();
        let first = 0.5 * im1 + (4.0 / (3.0 * h) - 1.0 / 6.0) * f.i0 - 2.0 / h * f.i_star;
        let second = ((-28.0 - h) * f.i0 + 24.0 * f.i2 - 12.0 * f.i_star) / (6.0 * h);
        let area = j31_area(lvl(h), o).unwrap();
        assert!(rel(first, second) < 1e-9, "{first} {second}");
        assert!(rel(area, second) < 1e-7, "{area} {second}");
    }
}

#[test]
fn istar_vanishes_quadratically_at_center() {
    // I*/(h+4)^2 -> I0'(-4)/12
    let o = QuadOptions::with_tol(1e-12);
    let h = lvl(-4.0 + 1e-4);
    let e = h.from_center();
    let is = abelian_istar(h, o).unwrap();
    let d0 = abelian_di(lvl(-4.0 + 1e-9), o).unwrap().0;
    assert!(rel(is / (e * e), d0 / 12.0) < 1e-4);
}

#[test]
fn derivative_of_i0_is_negative_on_grid() {
    let o = QuadOptions::default();
    for k in 1..200 {
        let h = -4.0 + 4.0 * k as f64 / 200.0;
        let (d0, d2, _) = abelian_di(lvl(h), o).unwrap();
        assert!(d0 < 0.0);
        let w = d2 / d0;
        assert!(w > 1.0 && w < 3.0);
    }
    let (d0, d2, _) = abelian_di(lvl(-4.0 + 1e-8), o).unwrap();
    assert!((d2 / d0 - 1.0).abs() < 1e-8);
}

#[test]
fn oval_extent_residuals() {
    for k in 1..4000 {
        let h = -4.0 + k as f64 * 1e-3;
        let e = oval_extent(lvl(h));
        let p = |x: f64| x * (x - 3.0) * (x - 3.0) + h;
        let tol = 1e-13 * h.abs().max(1.0);
        assert!(p(e.x1).abs() <= tol && p(e.x2).abs() <= tol, "{h}");
    }
}
