//! Zeros of the displacement function J for a few parameter points.
use tricycle::cyclicity::{count_zeros, Greek, JContext, PerturbationParams, ZeroOptions};

fn main() -> tricycle::Result<()> {
    let ctx = JContext::shared()?;
    let opts = ZeroOptions::default();
    let points = [
        Greek { lambda: 0.0, sigma: -144.0, gamma: 0.0, kappa: 0.0 },
        Greek { lambda: 1.0, sigma: 0.3, gamma: -0.5, kappa: 1.0 },
        Greek { lambda: -2.0, sigma: 1.0, gamma: 0.2, kappa: 0.0 },
    ];
    for g in points {
        let r = count_zeros(ctx, &PerturbationParams::from_greek(g), &opts)?;
        let hs: Vec<String> = r.zeros.iter().map(|z| format!("{:.6}", z.h)).collect();
        println!("{g:?}\n  {} zeros [{}], flagged {}", r.count, hs.join(", "), r.flagged);
    }
    Ok(())
}
