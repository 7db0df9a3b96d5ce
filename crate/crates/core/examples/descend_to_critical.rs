//! Gradient descent from random starts to local minima of a pure field; the
//! energies land between E0 and E_inf.

use spinlab::analytics::SphericalPSpin;
use spinlab::sim::{descend_to_critical, rng, sample_pure_field, SphereState};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 32;
    let model = SphericalPSpin::new(3)?;
    let field = sample_pure_field(3, n, 5)?;
    println!("E0 = {:.4}, E_inf = {:.4}", model.e_zero(), model.e_infinity());
    for start in 0..8 {
        let x0 = SphereState::uniform(n, &mut rng::stream(5, rng::Domain::Start, start));
        let r = descend_to_critical(&field, x0, 5000)?;
        println!("start {start}: E/N = {:.4}, |grad|/N = {:.1e}, {} iterations", r.energy_per_spin, r.grad_norm / n as f64, r.iters);
    }
    Ok(())
}
