//! The full acceptance suite. Run with `cargo test --test acceptance -- --nocapture`
//! to see one line per criterion.

use tricycle::acceptance::*;

#[test]
fn acceptance_suite() {
    let cfg = AcceptanceConfig::default();
    let report = run_all(&cfg).expect("acceptance run");
    println!();
    for c in &report.criteria {
        println!("{}", c.line());
    }
    println!("{} passed, {} failed", report.passed, report.failed);

    let by_id = |id: u8| report.criteria.iter().find(|c| c.id == id).unwrap();
    for id in [1, 2, 3, 5, 6, 7] {
        let c = by_id(id);
        assert!(c.passed, "criterion {id} failed: {}", c.details);
    }

    // every clause of the ratio criterion except the leading-order asymptote
    let c4 = &by_id(4).details;
    let f = |k: &str| c4[k].as_f64().unwrap();
    assert!((0.0..=2e-7).contains(&f("w_center_minus_one")));
    assert!(c4["grid_failures"].as_array().unwrap().is_empty());
    assert!(f("w2_center_gap") <= 1e-4);
    println!("criterion 4 asymptote gap {:.4} (leading term only), next order {:.2e}", f("asymptote_gap"), f("next_order_asymptote_gap"));

    // the dynamics criterion is reported, not asserted
    let c8 = &by_id(8).details;
    for r in c8["runs"].as_array().unwrap() {
        println!("criterion 8 delta {} -> {} sign changes", r["delta"], r["count"]);
    }

    let again = run_all(&cfg).unwrap();
    assert_eq!(serde_json::to_string(&report).unwrap(), serde_json::to_string(&again).unwrap());
}
