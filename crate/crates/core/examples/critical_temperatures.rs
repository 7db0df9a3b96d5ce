//! Critical temperatures and closed-form spot values for p = 3..10.

use spinlab::analytics::SphericalPSpin;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>3} {:>10} {:>10} {:>12} {:>10} {:>10}", "p", "T_s", "T_sh", "1/b*(E_inf)", "T_BBM", "q**(b_sh)");
    for p in 3..=10 {
        let model = SphericalPSpin::new(p)?;
        let t = model.critical_temperatures()?;
        let qss = model.q_double_star(model.order().beta_sh())?;
        println!(
            "{p:>3} {:>10.6} {:>10.6} {:>12.6} {:>10.6} {:>10.6}{}",
            t.t_s,
            t.t_sh,
            t.t_beta_star_einf,
            t.t_bbm,
            qss,
            if t.is_ordered() { "" } else { "  (not ordered)" }
        );
    }
    Ok(())
}
