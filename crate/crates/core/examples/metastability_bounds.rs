//! Spectral-gap and exit-probability bounds as the barrier height grows.

use spinlab::analytics::{metastability_bounds, BoundInputs, UniversalConstants};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>5} {:>12} {:>12} {:>7}", "N", "gap", "P(exit)", "eta ok");
    for n in [50u64, 100, 200, 400, 800] {
        let input = BoundInputs { k: 2.0, eps: 0.1, n, h: 0.05, beta: 1.2, t_horizon: 10.0, eta: 0.1 };
        let b = metastability_bounds(input, UniversalConstants::default())?;
        println!("{n:>5} {:>12.4e} {:>12.4e} {:>7}", b.gap_bound, b.exit_prob_bound, b.eta_ok);
    }
    Ok(())
}
