use proptest::prelude::*;
use tricycle::cyclicity::JContext;
use tricycle::simulate::*;
use tricycle::Error;

fn section(h: f64) -> SectionPoint {
    SectionPoint::from_h(h).unwrap()
}

#[test]
fn unperturbed_orbits_close() {
    let e = EpsVector::default();
    for h in [-3.9, -3.0, -2.0, -1.0, -0.1] {
        let r = poincare_return(section(h), &e, &SimOptions::default()).unwrap();
        assert!(r.displacement.abs() < 1e-10);
        assert!((r.t_return - r.start.t).abs() * 2f64.sqrt() < 1e-8, "{h}: {r:?}");
        assert!(r.period > 0.0);
    }
}

#[test]
fn first_integral_is_conserved() {
    let e = EpsVector::default();
    let s = section(-1.7);
    let r = poincare_return(s, &e, &SimOptions::default()).unwrap();
    assert!((h00_at(r.t_return, r.t_return) - s.h00).abs() < 1e-12);
}

#[test]
fn accumulated_displacement_matches_endpoint_difference() {
    let e = EpsVector::new([0.0, 2e-3, -1e-3, 1e-3, -1e-3]);
    for h in [-3.5, -2.0, -0.8] {
        let r = poincare_return(section(h), &e, &SimOptions::default()).unwrap();
        let direct = h00_at(r.t_return, r.t_return) - r.start.h00;
        assert!((r.displacement - direct).abs() < 1e-11, "{h}: {} {direct}", r.displacement);
    }
}

#[test]
fn divergence_perturbation_is_single_signed() {
    let e = EpsVector::new([1e-3, 0.0, 0.0, 0.0, 0.0]);
    let rep = count_cycles(&e, &CycleOptions::default()).unwrap();
    assert_eq!(rep.count, 0);
    let s0 = rep.samples[0].displacement.signum();
    assert!(rep.samples.iter().all(|r| r.displacement.signum() == s0));
    assert_eq!(e.mu(), [-1e-3, 0.0, 0.0, 0.0]);
}

#[test]
fn unperturbed_system_has_no_cycles() {
    let rep = count_cycles(&EpsVector::default(), &CycleOptions::default()).unwrap();
    assert_eq!(rep.count, 0);
    assert!(rep.max_abs_displacement < 1e-10);
}

#[test]
fn large_perturbations_escape() {
    let e = EpsVector::new([0.0, 0.5, 0.5, 0.0, 0.0]);
    let r = poincare_return(section(-0.05), &e, &SimOptions::default());
    assert!(matches!(r, Err(Error::Escape { .. })), "{r:?}");
}

// leading-order displacement against J for the quadratic mu directions
#[test]
fn low_order_directions_track_j() {
    let ctx = JContext::shared().unwrap();
    for (mu, k, sign) in [([1.0, 0.0, 0.0, 0.0], 1, -1.0), ([0.0, 1.0, 0.0, 0.0], 2, 1.0)] {
        let s = eps_from_mu(mu, 1e-3).unwrap();
        for h in [-3.5, -2.0, -0.5] {
            let r = poincare_return(section(h), &s.eps, &SimOptions::default()).unwrap();
            let ratio = r.displacement / s.scale / ctx.jk(k, h).unwrap();
            assert!((ratio - sign).abs() < 0.02, "mu{k} at {h}: {ratio}");
        }
    }
}

#[test]
fn gauge_failures() {
    assert!(matches!(eps_from_mu([0.0, 0.0, 0.0, 1.0], 1e-2), Err(Error::Gauge(_))));
    assert!(matches!(eps_from_mu([0.0, 0.0, 1.0, 0.0], 1e-2), Err(Error::Gauge(_))));
    let s = eps_from_mu([-1.0, 0.0, 0.0, 0.0], 1e-2).unwrap();
    assert_eq!(s.eps.eps, [1e-2, 0.0, 0.0, 0.0, 0.0]);
    assert_eq!(s.gauge, Gauge::Trivial);
}

fn cosine(a: [f64; 4], b: [f64; 4]) -> f64 {
    let d: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    let n = |v: [f64; 4]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    d / (n(a) * n(b))
}

proptest! {
    #[test]
    fn antisymmetric_gauge_reproduces_mu(
        m1 in -1.0f64..1.0, m2 in -1.0f64..1.0,
        m3 in prop_oneof![-1.0f64..-0.05, 0.05f64..1.0],
        m4 in prop_oneof![-1.0f64..-0.05, 0.05f64..1.0],
        delta in 1e-4f64..1e-1,
    ) {
        let mu = [m1, m2, m3, m4];
        let s = eps_from_mu(mu, delta).unwrap();
        prop_assert_eq!(s.gauge, Gauge::Antisymmetric);
        prop_assert!(cosine(s.eps.mu(), mu) >= 1.0 - 1e-12);
        for k in 0..4 {
            prop_assert!((s.mu_induced[k] - mu[k]).abs() < 1e-8 * (1.0 + mu[k].abs()));
        }
        prop_assert_eq!(s.eps.eps[3], -s.eps.eps[4]);
    }

    #[test]
    fn equal_gauge_reproduces_mu(
        m1 in -1.0f64..1.0,
        m2 in prop_oneof![-1.0f64..-0.05, 0.05f64..1.0],
        m4 in -1.0f64..1.0,
        delta in 1e-4f64..1e-1,
    ) {
        let mu = [m1, m2, 0.0, m4];
        let s = eps_from_mu(mu, delta).unwrap();
        prop_assert_eq!(s.gauge, Gauge::Equal);
        prop_assert!(cosine(s.eps.mu(), mu) >= 1.0 - 1e-12);
        prop_assert_eq!(s.eps.eps[3], s.eps.eps[4]);
    }

    #[test]
    fn section_levels_round_trip(h in -3.99f64..-0.01) {
        let s = section(h);
        prop_assert!((s.h - h).abs() < 1e-12);
        prop_assert!(s.t > 0.0 && s.t < 1.0 / 3.0);
    }
}
