//! Oval endpoints across the period annulus.
use tricycle::geometry::{oval_extent, EnergyLevel};

fn main() -> tricycle::Result<()> {
    println!("{:>8} {:>16} {:>16} {:>16}", "h", "x1", "x2", "x3");
    for h in [-3.999, -3.5, -2.0, -0.5, -1e-6] {
        let e = oval_extent(EnergyLevel::new(h)?);
        println!("{h:>8} {:>16.12} {:>16.12} {:>16.12}", e.x1, e.x2, e.x3());
    }
    Ok(())
}
