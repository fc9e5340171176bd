//! Abelian integrals by tanh-sinh quadrature, with the Picard-Fuchs residual.
use tricycle::geometry::EnergyLevel;
use tricycle::picard_fuchs::pf_residual;
use tricycle::quadrature::{frame, QuadOptions};

fn main() -> tricycle::Result<()> {
    let opts = QuadOptions::with_tol(1e-12);
    for h in [-3.9, -2.0, -0.1, -1e-6] {
        let f = frame(EnergyLevel::new(h)?, opts)?;
        println!(
            "h={h:<8} I*={:<22} I2={:<22} I0={:<22} residual={:.1e}",
            f.i_star,
            f.i2,
            f.i0,
            pf_residual(&f)
        );
    }
    Ok(())
}
