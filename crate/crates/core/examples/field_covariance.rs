//! Monte Carlo covariance of pure and co-dimension 1 fields against xi.

use spinlab::sim::field_covariance;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let overlaps = [0.1, 0.3, 0.5, 0.7, 0.9];
    for q in [None, Some(0.3), Some(0.7)] {
        println!("q = {q:?}");
        for pr in field_covariance(3, 24, 4000, &overlaps, q, 1)? {
            println!("  R = {:.1}: {:+.4} vs {:.4} (z = {:.2})", pr.overlap, pr.empirical, pr.theory, pr.z_score());
        }
    }
    Ok(())
}
