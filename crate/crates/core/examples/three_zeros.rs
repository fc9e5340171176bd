//! Parameters whose J has three prescribed simple zeros.
use tricycle::cyclicity::{find_three_zeros, JContext, ZeroOptions};

fn main() -> tricycle::Result<()> {
    let ctx = JContext::shared()?;
    for targets in [[-3.98, -3.95, -3.9], [-3.5, -2.0, -0.5]] {
        match find_three_zeros(ctx, targets, &ZeroOptions::default()) {
            Ok(t) => {
                let hs: Vec<f64> = t.report.zeros.iter().map(|z| z.h).collect();
                println!("{targets:?}: mu={:?}\n  zeros {hs:?}", t.params.mu);
            }
            Err(e) => println!("{targets:?}: {e}"),
        }
    }
    Ok(())
}
