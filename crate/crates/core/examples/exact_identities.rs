//! Exact resultants, factorizations and Sturm counts over the rationals.
use tricycle::polyalg::{identity_catalogue, named, parse, resultant, sturm_count, rat};

fn main() -> tricycle::Result<()> {
    for c in identity_catalogue() {
        println!("{:<22} {:<5} {}", c.name, c.holds, c.statement);
    }
    let p = parse("w^2 - h*w + 1");
    let q = parse("w - 2");
    println!("res_w(w^2 - h w + 1, w - 2) = {}", resultant(&p, &q, "w")?);
    println!("roots of chi2 in (-4, 0): {}", sturm_count(&named::chi2(), "h", &rat(-4, 1), &rat(0, 1))?);
    Ok(())
}
