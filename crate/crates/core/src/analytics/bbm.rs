use super::fixed_point::energy_at_threshold;
use super::free_energy::f_rs_unchecked;
use super::{AnalyticsError, ModelOrder, Result, SphericalPSpin, VHessian};
use crate::numerics::golden_max;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const GRID_POINTS: usize = 2000;
const NEWTON_ITERS: usize = 80;

/// Maximizer of `V = F_RS + Theta` over the feasible set at fixed `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BbmOptimum {
    pub beta: f64,
    pub e_opt: f64,
    pub q_opt: f64,
    pub value: f64,
    pub grad_norm: f64,
    pub hessian_det: f64,
    pub interior: bool,
    pub stationarity_residual: f64,
}

impl BbmOptimum {
    pub fn temperature(&self) -> f64 {
        1.0 / self.beta
    }
}

/// `|E + beta (q^p + p (1-q^2) q^(p-2))|`.
pub(super) fn stationarity_residual(p: u32, energy: f64, q: f64, beta: f64) -> f64 {
    let pi = p as i32;
    (energy + beta * (q.powi(pi) + p as f64 * (1.0 - q * q) * q.powi(pi - 2))).abs()
}

impl SphericalPSpin {
    /// Energy range `E_T = [E0, E_c]` on which `beta >= beta_*(E)`.
    pub fn feasible_energies(&self, beta: f64) -> Result<(f64, f64)> {
        let lo = self.e_zero();
        let b0 = self.beta_star(lo)?;
        if beta < b0 {
            return Err(AnalyticsError::EmptyFeasibleSet {
                temperature: 1.0 / beta,
                t_bbm: 1.0 / b0,
            });
        }
        let hi = energy_at_threshold(self.order, beta).clamp(lo, self.e_infinity());
        Ok((lo, hi))
    }

    /// `(V(E, q_*(E,beta), beta), q_*)`; the inner maximum over `q` is attained at `q_*`.
    fn profile(&self, energy: f64, beta: f64) -> Result<(f64, f64)> {
        let q = self.solve_fixed_point(energy, beta)?.q_star;
        Ok((f_rs_unchecked(self.p(), energy, q, beta) + self.complexity(energy), q))
    }

    /// `dV/dE` along the curve `q = q_*(E, beta)`, and its derivative `det / V_qq`.
    fn reduced_slope(&self, energy: f64, beta: f64) -> Result<(f64, f64, f64)> {
        let q = self.solve_fixed_point(energy, beta)?.q_star;
        let slope = super::free_energy::d_e_unchecked(self.order, energy, q, beta);
        let h = VHessian::at_fixed_point(self.order, energy, q, beta);
        Ok((slope, h.det() / h.d_qq, q))
    }

    pub fn bbm_maximize(&self, beta: f64) -> Result<BbmOptimum> {
        let (lo, hi) = self.feasible_energies(beta)?;
        let step = (hi - lo) / (GRID_POINTS - 1) as f64;
        let grid: Vec<f64> = (0..GRID_POINTS)
            .map(|i| if i + 1 == GRID_POINTS { hi } else { lo + i as f64 * step })
            .collect();
        let values: Vec<f64> = grid
            .par_iter()
            .map(|&e| self.profile(e, beta).map(|(v, _)| v))
            .collect::<Result<_>>()?;

        // local maxima of the scan, ties resolved towards smaller E
        let n = values.len();
        let is_local_max = |i: usize| {
            (i == 0 || values[i] >= values[i - 1]) && (i + 1 == n || values[i] >= values[i + 1])
        };
        let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let best = (0..n)
            .find(|&i| is_local_max(i) && values[i] >= top - self.tol.tie_break)
            .unwrap_or(0);

        // The top of the profile is flat to within rounding noise over many grid
        // cells, so the bracket is located from the sign of the analytic slope
        // rather than from neighbouring scan values.
        let slope = |i: usize| self.reduced_slope(grid[i], beta).map(|(s, _, _)| s);
        let mut e_opt = grid[best];
        if hi > lo {
            let s0 = slope(best)?;
            let bracket = if s0 > 0.0 {
                let mut j = best + 1;
                while j < n && slope(j)? > 0.0 {
                    j += 1;
                }
                (j < n).then(|| (grid[j - 1], grid[j]))
            } else if s0 < 0.0 {
                let mut j = best;
                while j > 0 && slope(j - 1)? < 0.0 {
                    j -= 1;
                }
                (j > 0).then(|| (grid[j - 1], grid[j]))
            } else {
                None
            };
            if let Some((a, b)) = bracket {
                let (e, _) = golden_max(
                    |e| self.profile(e, beta).map(|(v, _)| v).unwrap_or(f64::NEG_INFINITY),
                    a,
                    b,
                    1e-12,
                );
                // Newton polish on the reduced stationarity condition, safeguarded by the bracket
                e_opt = self.polish(e, a, b, beta)?;
            } else if s0 != 0.0 {
                // monotone profile from the chosen cell onwards: boundary maximum
                e_opt = if s0 > 0.0 { hi } else { lo };
            }
        }

        let (value, q_opt) = self.profile(e_opt, beta)?;
        let grad = self.v_gradient(e_opt, q_opt, beta)?;
        let hess = VHessian::at_fixed_point(self.order, e_opt, q_opt, beta);
        let hessian_det = hess.det();
        let pf = self.order.as_f64();
        let margin = 1e-9 * (hi - lo).max(1e-300);
        let geometric = e_opt > lo + margin && e_opt < hi - margin && q_opt < 1.0 - 1e-6;
        let grad_norm = grad.norm();
        let interior = geometric
            && grad_norm <= self.tol.grad_norm
            && hessian_det > 0.0
            && (pf - 1.0) * q_opt * q_opt > pf - 2.0;
        Ok(BbmOptimum {
            beta,
            e_opt,
            q_opt,
            value,
            grad_norm,
            hessian_det,
            interior,
            stationarity_residual: stationarity_residual(self.p(), e_opt, q_opt, beta),
        })
    }

    fn polish(&self, start: f64, a: f64, b: f64, beta: f64) -> Result<f64> {
        let (sa, _, _) = self.reduced_slope(a, beta)?;
        let (sb, _, _) = self.reduced_slope(b, beta)?;
        // a maximum has the slope crossing from positive to negative
        if !(sa > 0.0 && sb < 0.0) {
            return Ok(start);
        }
        let (mut lo, mut hi) = (a, b);
        let mut e = start.clamp(a, b);
        for _ in 0..NEWTON_ITERS {
            let (s, ds, _) = self.reduced_slope(e, beta)?;
            if s == 0.0 {
                return Ok(e);
            }
            if s > 0.0 {
                lo = e;
            } else {
                hi = e;
            }
            let newton = e - s / ds;
            let next = if ds.is_finite() && ds < 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - e).abs() <= 4.0 * f64::EPSILON * e.abs() || hi - lo <= 4.0 * f64::EPSILON * e.abs() {
                return Ok(next);
            }
            e = next;
        }
        Ok(e)
    }
}

pub fn bbm_maximize(p: ModelOrder, beta: f64) -> Result<BbmOptimum> {
    SphericalPSpin::with_tolerances(p, Default::default())?.bbm_maximize(beta)
}
