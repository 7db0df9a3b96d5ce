//! Runs the randomized identity audits, then the same audits with the closed
//! forms perturbed by one part in a million to show they catch it.

use spinlab::analytics::{identity_audits, ModelOrder};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = ModelOrder::new(3)?;
    for tamper in [0.0, 1e-6] {
        let report = identity_audits(p, 2000, 42, tamper)?;
        println!("tamper = {tamper:e}: passed = {}", report.passed());
        for c in &report.checks {
            println!("  {:<24} max error {:.3e} (tol {:.0e}) {}", c.name, c.max_error, c.tolerance, if c.passed { "ok" } else { "FAIL" });
        }
    }
    Ok(())
}
