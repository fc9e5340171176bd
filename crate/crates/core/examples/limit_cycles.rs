//! Poincaré displacement of the perturbed system along the diagonal section.
use tricycle::simulate::{count_cycles, eps_from_mu, CycleOptions, EpsVector};

fn main() -> tricycle::Result<()> {
    let opts = CycleOptions::default();
    let e = EpsVector::new([1e-3, 0.0, 0.0, 0.0, 0.0]);
    println!("eps0 only: {} cycles", count_cycles(&e, &opts)?.count);

    let mu = [0.2, 0.9, -0.2, -0.1];
    for delta in [1e-2, 1e-3] {
        let s = eps_from_mu(mu, delta)?;
        let r = count_cycles(&s.eps, &opts)?;
        println!("delta={delta} gauge={:?} eps={:?}", s.gauge, s.eps.eps);
        for x in r.samples.iter().step_by(9) {
            println!("  h={:<8.4} D/scale={:.4e}", x.start.h, x.displacement / s.scale);
        }
        println!("  {} cycles, {} escaped", r.count, r.escaped.len());
    }
    Ok(())
}
