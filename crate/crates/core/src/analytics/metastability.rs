use super::{AnalyticsError, Result};
use serde::{Deserialize, Serialize};

/// Arguments of the barrier and well bounds. `n` is the dimension, `h` the
/// barrier (or well depth) per spin, `t_horizon` the time horizon of the exit
/// bound and `eta` the band half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub k: f64,
    pub eps: f64,
    pub n: u64,
    pub h: f64,
    pub beta: f64,
    pub t_horizon: f64,
    pub eta: f64,
}

/// Unspecified universal constants of the exit bound and of the band-width
/// condition; both default to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniversalConstants {
    pub c_exit: f64,
    pub c_width: f64,
}

impl Default for UniversalConstants {
    fn default() -> Self {
        UniversalConstants { c_exit: 1.0, c_width: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetastabilityBounds {
    /// Upper bound on the spectral gap, `(K/eps)^2 e^{-Nh} / (1 - 4 e^{-Nh})`.
    pub gap_bound: f64,
    /// Upper bound on the probability of leaving the well before `t_horizon`.
    pub exit_prob_bound: f64,
    /// Whether `eta <= sqrt(C' h / (1 + beta K))`.
    pub eta_ok: bool,
}

pub fn metastability_bounds(input: BoundInputs, constants: UniversalConstants) -> Result<MetastabilityBounds> {
    let BoundInputs { k, eps, n, h, beta, t_horizon, eta } = input;
    for (what, v) in [
        ("K", k),
        ("eps", eps),
        ("h", h),
        ("beta", beta),
        ("T_horizon", t_horizon),
        ("eta", eta),
        ("N", n as f64),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(AnalyticsError::Domain { what, value: v, domain: "(0, inf)".into() });
        }
    }
    let nh = n as f64 * h;
    if nh <= 4f64.ln() {
        return Err(AnalyticsError::Domain {
            what: "N h",
            value: nh,
            domain: format!("(log 4 = {}, inf)", 4f64.ln()),
        });
    }
    let decay = (-nh).exp();
    let gap_bound = (k / eps).powi(2) * decay / (1.0 - 4.0 * decay);
    let exit_prob_bound = constants.c_exit * (1.0 + nh * t_horizon / eta.powi(4)) * decay;
    let eta_ok = eta <= (constants.c_width * h / (1.0 + beta * k)).sqrt();
    Ok(MetastabilityBounds { gap_bound, exit_prob_bound, eta_ok })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(k: f64, eps: f64, n: u64, h: f64) -> BoundInputs {
        BoundInputs { k, eps, n, h, beta: 1.0, t_horizon: 1.0, eta: 0.1 }
    }

    #[test]
    fn reference_gap_value() {
        let b = metastability_bounds(inputs(2.0, 0.1, 100, 0.05), Default::default()).unwrap();
        // 400 e^-5 / (1 - 4 e^-5) evaluated directly: 2.769830689154028
        assert!((b.gap_bound - 2.769_830_689_154_028).abs() < 1e-12);
    }

    #[test]
    fn gap_approaches_pure_exponential() {
        let b = metastability_bounds(inputs(1.0, 1.0, 10_000, 0.01), Default::default()).unwrap();
        let ratio = b.gap_bound / (-100f64).exp();
        assert!((ratio - 1.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_of_validity() {
        let h = (4f64.ln() + 1e-9) / 1000.0;
        let r = metastability_bounds(inputs(1.0, 1.0, 1000, h), Default::default());
        // N h rounds to just above log 4, which is still allowed but blows up
        if let Ok(b) = r {
            assert!(b.gap_bound > 1e7);
        }
        let h = 4f64.ln() / 1000.0;
        assert!(metastability_bounds(inputs(1.0, 1.0, 1000, h), Default::default()).is_err());
        assert!(metastability_bounds(inputs(1.0, 1.0, 1000, 0.0001), Default::default()).is_err());
    }

    #[test]
    fn exit_bound_and_width_condition() {
        let i = BoundInputs { k: 3.0, eps: 0.5, n: 200, h: 0.1, beta: 2.0, t_horizon: 10.0, eta: 0.05 };
        let b = metastability_bounds(i, Default::default()).unwrap();
        let expect = (1.0 + 20.0 * 10.0 / 0.05f64.powi(4)) * (-20f64).exp();
        assert!((b.exit_prob_bound - expect).abs() < 1e-12 * expect);
        // sqrt(0.1 / 7) = 0.1195
        assert!(b.eta_ok);
        let wide = metastability_bounds(BoundInputs { eta: 0.2, ..i }, Default::default()).unwrap();
        assert!(!wide.eta_ok);
        let loose = UniversalConstants { c_exit: 1.0, c_width: 4.0 };
        assert!(metastability_bounds(BoundInputs { eta: 0.2, ..i }, loose).unwrap().eta_ok);
    }
}
