//! Integrals along the Picard-Fuchs flow compared with direct quadrature.
use tricycle::geometry::EnergyLevel;
use tricycle::picard_fuchs::{FlowOptions, FrameCache, SeparatrixFit};
use tricycle::quadrature::{frame, QuadOptions};

fn main() -> tricycle::Result<()> {
    let quad = QuadOptions::with_tol(1e-12);
    let fit = SeparatrixFit::fit(quad)?;
    println!("separatrix constants k0={} k2={} ks={} (c={})", fit.k0, fit.k2, fit.ks, fit.c());
    let cache = FrameCache::build(FlowOptions::default())?.with_separatrix(fit);
    println!("flow span {:?} in {} steps", cache.span(), cache.steps());
    for h in [-3.9999, -3.0, -1.0, -1e-3, -1e-9] {
        let a = cache.frame(EnergyLevel::new(h)?)?;
        let b = frame(EnergyLevel::new(h)?, quad)?;
        println!("h={h:<8} I0 flow={:<20} quad={:<20} gap={:.1e}", a.i0, b.i0, (a.i0 - b.i0).abs());
    }
    Ok(())
}
