use proptest::prelude::*;
use tricycle::polyalg::{identity_catalogue, int, named, parse, rat, ExactPoly, Rat};

#[test]
fn every_catalogued_identity_holds() {
    let checks = identity_catalogue();
    assert!(checks.len() >= 30);
    for c in &checks {
        assert!(c.holds, "{}: {} ({:?})", c.name, c.statement, c.residual);
    }
}

#[test]
fn envelopes_bracket_one_and_three() {
    let l1 = named::l1();
    let l2 = named::l2();
    assert_eq!(l1.eval(&[("h", int(-4))]).unwrap(), int(1));
    assert_eq!(l2.eval(&[("h", int(0))]).unwrap(), int(3));
    assert_eq!(l2.eval(&[("h", int(-4))]).unwrap(), int(1));
    assert_eq!(l1.eval(&[("h", int(0))]).unwrap(), rat(5, 3));
}

#[test]
fn unknown_name_is_an_error() {
    assert!(named::by_name("omega").is_err());
    for n in named::NAMES {
        assert!(named::by_name(n).is_ok());
    }
}

#[test]
fn float_and_exact_evaluation_agree() {
    let z = named::zeta();
    let e = z.eval(&[("h", rat(-3, 2)), ("w", rat(9, 5))]).unwrap();
    let f = z.eval_f64(&[("h", -1.5), ("w", 1.8)]);
    assert!((num_traits::ToPrimitive::to_f64(&e).unwrap() - f).abs() < 1e-10);
}

fn arb_poly() -> impl Strategy<Value = ExactPoly> {
    let term = (-20i64..20, 1i64..6, 0u32..4, 0u32..3, 0u32..2);
    prop::collection::vec(term, 0..6).prop_map(|ts| {
        let mut p = ExactPoly::zero();
        for (n, d, a, b, c) in ts {
            let mono = parse(&format!("h^{a}*w^{b}*kappa^{c}"));
            p = p + mono.scale(&Rat::new(n.into(), d.into()));
        }
        p
    })
}

proptest! {
    #[test]
    fn text_round_trip(p in arb_poly()) {
        let back = ExactPoly::parse(&p.to_string()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn ring_laws(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&(&a - &b) + &b - a.clone()).is_zero());
        if !b.is_zero() {
            prop_assert_eq!((&a * &b).div_exact(&b).unwrap(), a.clone());
        }
    }

    #[test]
    fn leibniz_rule(a in arb_poly(), b in arb_poly()) {
        let lhs = (&a * &b).derivative("h");
        let rhs = &(&a.derivative("h") * &b) + &(&a * &b.derivative("h"));
        prop_assert_eq!(lhs, rhs);
    }
}
