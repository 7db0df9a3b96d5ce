//! Scans the BBM maximum across temperature for p = 3 and reports the
//! certified shattering window.

use spinlab::analytics::{AnalyticsError, SphericalPSpin};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = SphericalPSpin::new(3)?;
    let temps = model.critical_temperatures()?;
    println!("# T E_opt q_opt V_max-beta^2/2 interior");
    for i in 0..=30 {
        let t = 0.7 + 0.5 * i as f64 / 30.0;
        let beta = 1.0 / t;
        match model.bbm_maximize(beta) {
            Ok(o) => println!("{t:.4} {:.6} {:.6} {:+.3e} {}", o.e_opt, o.q_opt, o.value - 0.5 * beta * beta, o.interior),
            Err(AnalyticsError::EmptyFeasibleSet { .. }) => println!("{t:.4} - - - empty (T > T_BBM = {:.4})", temps.t_bbm),
            Err(e) => return Err(e.into()),
        }
    }

    let w = model.shattering_window()?;
    println!("\nwindow: ({:.6}, {:.6}], delta0 = {:.6}", w.t_lo, w.t_hi, w.delta0);
    let first = w.points.iter().find(|p| p.qualifies).unwrap();
    println!("at T = {:.6}: E_opt - E0 = {:.3e}", first.temperature, first.optimum.e_opt - model.e_zero());
    Ok(())
}
