//! Band free energy around a planted critical point against the replica
//! symmetric prediction, and the full-sphere free energy above it.

use spinlab::analytics::SphericalPSpin;
use spinlab::sim::{mc_restricted_free_energy, plant_critical_field, BandSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (n, t) = (24, 0.7);
    let model = SphericalPSpin::new(3)?;
    let e = model.e_zero() + 0.02;
    let beta = 1.0 / t;
    let q = model.solve_fixed_point(e, beta)?.q_star;
    let field = plant_critical_field(3, n, e, 0)?;
    let band = BandSpec::new(field.center(), q, 0.02)?;

    let inside = mc_restricted_free_energy(&field, beta, Some(&band), 1000, 0)?;
    let full = mc_restricted_free_energy(&field, beta, None, 1000, 0)?;
    println!("E = {e:.4}, q* = {q:.4}, N = {n}");
    println!("band:   {:.4} +- {:.4} (ESS {:.0})", inside.estimate, inside.std_err, inside.ess);
    println!("F_RS:   {:.4}", model.f_rs(e, q, beta)?);
    println!("sphere: {:.4} +- {:.4}; beta^2/2 = {:.4}", full.estimate, full.std_err, 0.5 * beta * beta);
    Ok(())
}
