use super::field::Landscape;
use super::sphere::dot;
use super::{invalid, Result, SimError, SphereState};
use serde::{Deserialize, Serialize};

const GRAD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentResult {
    pub x: SphereState,
    /// `|covariant grad H| / N` at `x`.
    pub grad_norm: f64,
    pub energy: f64,
    pub energy_per_spin: f64,
    pub iters: usize,
}

/// Projected gradient descent with Armijo backtracking, stopping once
/// `|grad H| / N <= 1e-8`. Fails with [`SimError::NotConverged`] carrying the
/// best iterate when `max_iters` is exhausted.
pub fn descend_to_critical<L: Landscape + ?Sized>(field: &L, x0: SphereState, max_iters: usize) -> Result<DescentResult> {
    let n = field.dim();
    if x0.dim() != n {
        return Err(invalid("dimension", format!("field has N = {n}, state has {}", x0.dim())));
    }
    let nf = n as f64;
    let mut x = x0;
    let (mut e, mut g) = field.energy_grad(&x);
    // step length in units of sqrt(N) per unit gradient, adapted across iterations
    let mut step = 1.0 / nf;
    let mut iters = 0;
    let result = |x: SphereState, e: f64, g: &[f64], iters| DescentResult {
        x,
        grad_norm: dot(g, g).sqrt() / nf,
        energy: e,
        energy_per_spin: e / nf,
        iters,
    };
    loop {
        let g2 = dot(&g, &g);
        if g2.sqrt() / nf <= GRAD_TOL {
            return Ok(result(x, e, &g, iters));
        }
        if iters == max_iters {
            let best = result(x, e, &g, iters);
            let grad_norm = best.grad_norm;
            return Err(SimError::NotConverged { best: Box::new(best), iters, grad_norm });
        }
        iters += 1;
        step *= 2.0;
        loop {
            let delta: Vec<f64> = g.iter().map(|v| -step * v).collect();
            let y = x.retract(&delta)?;
            let ey = field.energy(y.coords());
            if ey <= e - 1e-4 * step * g2 {
                x = y;
                (e, g) = field.energy_grad(&x);
                break;
            }
            step *= 0.5;
            if step * g2.sqrt() < 1e-14 * nf.sqrt() {
                // no representable decrease left; report the current point
                let best = result(x, e, &g, iters);
                let grad_norm = best.grad_norm;
                return Err(SimError::NotConverged { best: Box::new(best), iters, grad_norm });
            }
        }
    }
}
