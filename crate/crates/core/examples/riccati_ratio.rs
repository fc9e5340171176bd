//! The ratio w = I2'/I0' from the Riccati flow, its derivatives and envelope.
use tricycle::geometry::EnergyLevel;
use tricycle::ratio::{envelope_check, ratio_point, w_separatrix_asymptote};

fn main() -> tricycle::Result<()> {
    for h in [-3.99, -3.0, -2.0, -1.0, -0.1, -1e-6] {
        let p = ratio_point(EnergyLevel::new(h)?)?;
        let e = envelope_check(h, p.w)?;
        println!(
            "h={h:<6} w={:.10} w'={:.3e} w''={:.3e} w'''={:.3e} margins=({:.2e}, {:.2e})",
            p.w, p.w1, p.w2, p.w3, e.tangent_margin, e.chord_margin
        );
    }
    println!("leading asymptote at -1e-6: {}", w_separatrix_asymptote(-1e-6));
    Ok(())
}
