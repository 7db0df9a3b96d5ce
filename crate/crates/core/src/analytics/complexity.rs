use super::{AnalyticsError, ModelOrder, Result, SphericalPSpin, Tolerances};
use crate::numerics::{bisect, integrate};
use serde::{Deserialize, Serialize};

/// Threshold energy, ground-state proxy and the complexity at threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyLandmarks {
    pub p: u32,
    pub e_infinity: f64,
    pub e_zero: f64,
    pub theta_at_e_infinity: f64,
}

pub(super) fn theta(order: ModelOrder, energy: f64, quad_tol: f64) -> f64 {
    let p = order.as_f64();
    let half_log = 0.5 * (p - 1.0).ln();
    if energy >= 0.0 {
        return half_log;
    }
    let quadratic = half_log - (p - 2.0) / (4.0 * (p - 1.0)) * energy * energy;
    let e_inf = order.e_infinity();
    if energy >= e_inf {
        return quadratic;
    }
    let e_inf_sq = e_inf * e_inf;
    let integral = integrate(
        |z| (z * z - e_inf_sq).max(0.0).sqrt(),
        energy,
        e_inf,
        quad_tol,
    )
    .unwrap_or(f64::NAN);
    quadratic - 2.0 / e_inf_sq * integral
}

/// Asymptotic complexity of critical points below normalized energy `energy`.
pub fn asymptotic_complexity(p: ModelOrder, energy: f64) -> f64 {
    theta(p, energy, Tolerances::default().quadrature_abs)
}

/// `dTheta/dE`. At `E_infinity` and `0` this is continuous, so either one-sided
/// formula applies.
pub fn complexity_derivative(p: ModelOrder, energy: f64) -> f64 {
    let pf = p.as_f64();
    if energy >= 0.0 {
        return 0.0;
    }
    let e_inf = p.e_infinity();
    let linear = -(pf - 2.0) / (2.0 * (pf - 1.0)) * energy;
    if energy >= e_inf {
        return linear;
    }
    linear + 2.0 / (e_inf * e_inf) * (energy * energy - e_inf * e_inf).sqrt()
}

pub(super) fn landmarks_with(order: ModelOrder, tol: &Tolerances) -> Result<EnergyLandmarks> {
    let e_inf = order.e_infinity();
    let theta_inf = theta(order, e_inf, tol.quadrature_abs);
    let lo = e_inf - 2.0;
    let f = |e: f64| theta(order, e, tol.quadrature_abs);
    let (f_lo, f_hi) = (f(lo), f(e_inf));
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(AnalyticsError::Domain {
            what: "complexity bracket",
            value: f_lo,
            domain: format!("Theta({lo}) < 0 < Theta({e_inf}) = {f_hi}"),
        });
    }
    let e_zero = bisect(f, lo, e_inf, tol.root_x)?;
    Ok(EnergyLandmarks {
        p: order.get(),
        e_infinity: e_inf,
        e_zero,
        theta_at_e_infinity: theta_inf,
    })
}

/// Threshold energy, zero of the complexity, and `Theta(E_infinity)`.
pub fn energy_landmarks(p: ModelOrder) -> Result<EnergyLandmarks> {
    landmarks_with(p, &Tolerances::default())
}

impl SphericalPSpin {
    pub fn complexity_derivative(&self, energy: f64) -> f64 {
        complexity_derivative(self.order, energy)
    }
}
