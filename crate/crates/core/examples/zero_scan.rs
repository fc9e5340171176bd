//! Seeded random scan of zero counts, summarized by stratum.
use tricycle::cyclicity::{scan, JContext, ScanSpec, ZeroOptions};

fn main() -> tricycle::Result<()> {
    let ctx = JContext::shared()?;
    let spec = ScanSpec { samples: 2000, ..ScanSpec::default() };
    let r = scan(ctx, &spec, &ZeroOptions::default())?;
    for s in &r.strata {
        println!("{:<22} n={:<5} max={} bound={} histogram={:?}", s.name, s.samples, s.max_count, s.predicted_bound, s.histogram);
    }
    println!("global max {}, flagged {}", r.global_max, r.flagged_samples);
    Ok(())
}
