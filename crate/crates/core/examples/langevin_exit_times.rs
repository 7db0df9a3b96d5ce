//! Exit times from the band around a planted critical point, at a low and a
//! high temperature, for growing N.

use spinlab::analytics::SphericalPSpin;
use spinlab::sim::{exit_time_experiment, ExitExperiment};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = SphericalPSpin::new(3)?;
    let t_bbm = model.critical_temperatures()?.t_bbm;
    let e = model.e_zero();
    for t in [0.75 * t_bbm, 3.0 * t_bbm] {
        // the fixed point of the low temperature fixes the band for both runs
        let q = model.solve_fixed_point(e, 1.0 / (0.75 * t_bbm))?.q_star;
        let mut exp = ExitExperiment::new(3, vec![16, 24, 32], e, t, q, 0.099);
        exp.replicas = 16;
        exp.burn_in = 2000;
        exp.horizon = 20.0;
        exp.allow_any_q = true;
        println!("T = {t:.4}");
        for s in exit_time_experiment(&exp)? {
            println!("  N = {:>2}: mean log exit {:+.3}, mean exit {:.3}, censored {:.2}", s.n, s.mean_log_exit, s.mean_exit_time, s.censored_fraction);
        }
    }
    Ok(())
}
