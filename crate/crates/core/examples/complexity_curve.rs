//! Tabulates the asymptotic complexity Theta(E) and marks E0 and E_inf.
//!
//! cargo run --example complexity_curve -- 4

use spinlab::analytics::{asymptotic_complexity, energy_landmarks, ModelOrder};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p: u32 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(3);
    let order = ModelOrder::new(p)?;
    let marks = energy_landmarks(order)?;
    println!("# p = {p}: E0 = {:.6}, E_inf = {:.6}, Theta(E_inf) = {:.6}", marks.e_zero, marks.e_infinity, marks.theta_at_e_infinity);
    println!("# E Theta");
    let (lo, hi) = (marks.e_zero - 0.05, 0.0);
    for i in 0..=40 {
        let e = lo + (hi - lo) * i as f64 / 40.0;
        println!("{e:.5} {:.8}", asymptotic_complexity(order, e));
    }
    Ok(())
}
