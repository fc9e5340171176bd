//! Wronskian-type determinants of (J1, J2, J3, J4) from the center outward.
use tricycle::cyclicity::{ect_window, JContext};

fn main() -> tricycle::Result<()> {
    let ctx = JContext::shared()?;
    let w = ect_window(ctx, 12, 2e-3, 1e-6)?;
    for p in &w.points {
        println!("h={:<12.6} {:?}", p.h, p.deltas.map(|d| format!("{d:.3e}")));
    }
    println!("window b={} certified={} all negative={}", w.b, w.certified, w.all_negative);
    Ok(())
}
