use super::{AnalyticsError, ModelOrder, Result, SphericalPSpin};
use crate::numerics::bisect;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointSolution {
    pub energy: f64,
    pub beta: f64,
    pub q_star: f64,
    pub residual: f64,
}

/// `(1 - q^2) q^(p-2)`, the left-hand side of the fixed-point equation.
pub(super) fn lhs(p: u32, q: f64) -> f64 {
    (1.0 - q * q) * q.powi(p as i32 - 2)
}

/// Maximum of [`lhs`] over `[0, 1]`, attained at `q^2 = (p-2)/p`.
pub(super) fn lhs_max(p: u32) -> f64 {
    let pf = p as f64;
    (2.0 / pf) * ((pf - 2.0) / pf).powf((pf - 2.0) / 2.0)
}

/// `(-E - sqrt(E^2 - E_inf^2)) / (2 (p-1))`; the fixed-point right-hand side
/// times `beta`.
pub(super) fn rhs_numerator(order: ModelOrder, energy: f64) -> f64 {
    let e_inf = order.e_infinity();
    let disc = (energy * energy - e_inf * e_inf).max(0.0).sqrt();
    (-energy - disc) / (2.0 * (order.as_f64() - 1.0))
}

/// Largest energy with `beta_*(E) <= beta`, from inverting `rhs_numerator`.
/// Once `beta >= beta_*(E_inf)` every energy up to `E_inf` qualifies; the
/// algebraic inverse would otherwise fold back onto the other root.
pub(super) fn energy_at_threshold(order: ModelOrder, beta: f64) -> f64 {
    let s = 2.0 * (order.as_f64() - 1.0) * beta * lhs_max(order.get());
    let e_inf = order.e_infinity();
    if s >= -e_inf {
        return e_inf;
    }
    -(e_inf * e_inf + s * s) / (2.0 * s)
}

impl SphericalPSpin {
    pub(super) fn check_energy_window(&self, energy: f64) -> Result<()> {
        let (lo, hi) = (self.e_zero(), self.e_infinity());
        if !(energy >= lo - 1e-12 && energy <= hi + 1e-12) {
            return Err(AnalyticsError::Domain {
                what: "energy",
                value: energy,
                domain: format!("[E0, E_inf] = [{lo}, {hi}]"),
            });
        }
        Ok(())
    }

    /// Smallest `beta` with a fixed point on the `q > sqrt((p-2)/p)` branch.
    pub fn beta_star(&self, energy: f64) -> Result<f64> {
        self.check_energy_window(energy)?;
        Ok(rhs_numerator(self.order, energy) / lhs_max(self.p()))
    }

    /// Root of the fixed-point equation on the decreasing branch
    /// `q >= sqrt((p-2)/p)`.
    pub fn solve_fixed_point(&self, energy: f64, beta: f64) -> Result<FixedPointSolution> {
        self.check_energy_window(energy)?;
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(AnalyticsError::Domain {
                what: "beta",
                value: beta,
                domain: "(0, inf)".into(),
            });
        }
        let p = self.p();
        let target = rhs_numerator(self.order, energy) / beta;
        let peak = lhs_max(p);
        let floor = self.order.q_branch_floor();
        let q_star = if target > peak {
            // allow rounding slack at the threshold itself
            if target - peak > 1e-12 * peak {
                return Err(AnalyticsError::NoSolution {
                    energy,
                    beta,
                    beta_star: rhs_numerator(self.order, energy) / peak,
                });
            }
            floor
        } else {
            let hi = 1.0 - 1e-12;
            if lhs(p, hi) >= target {
                hi
            } else {
                bisect(|q| lhs(p, q) - target, floor, hi, self.tol.root_x)?
            }
        };
        let residual = (lhs(p, q_star) - target).abs();
        Ok(FixedPointSolution { energy, beta, q_star, residual })
    }

    /// `q_**(beta) = q_*(E_inf, beta)`.
    pub fn q_double_star(&self, beta: f64) -> Result<f64> {
        Ok(self.solve_fixed_point(self.e_infinity(), beta)?.q_star)
    }
}

pub fn beta_star(p: ModelOrder, energy: f64) -> Result<f64> {
    SphericalPSpin::with_tolerances(p, Default::default())?.beta_star(energy)
}

pub fn solve_fixed_point(p: ModelOrder, energy: f64, beta: f64) -> Result<FixedPointSolution> {
    SphericalPSpin::with_tolerances(p, Default::default())?.solve_fixed_point(energy, beta)
}
