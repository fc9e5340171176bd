//! Run the acceptance criteria with a reduced scan and print the JSON report.
use tricycle::acceptance::{run_all, AcceptanceConfig};
use tricycle::cyclicity::ScanSpec;

fn main() -> tricycle::Result<()> {
    let cfg = AcceptanceConfig {
        scan: ScanSpec { samples: 1000, ..ScanSpec::default() },
        ..AcceptanceConfig::default()
    };
    let r = run_all(&cfg)?;
    for c in &r.criteria {
        eprintln!("{}", c.line());
    }
    println!("{}", serde_json::to_string_pretty(&r)?);
    Ok(())
}
