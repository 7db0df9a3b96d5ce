use super::complexity::complexity_derivative;
use super::{rs_test, AnalyticsError, MixedModel, ModelOrder, Result, SphericalPSpin};
use serde::{Deserialize, Serialize};

/// `I(q) = -log(1 - q^2) / 2`.
pub fn rate_function(q: f64) -> Result<f64> {
    check_q(q)?;
    Ok(-0.5 * (-q * q).ln_1p())
}

fn check_q(q: f64) -> Result<()> {
    if !(0.0..1.0).contains(&q) {
        return Err(AnalyticsError::Domain {
            what: "q",
            value: q,
            domain: "[0, 1)".into(),
        });
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(AnalyticsError::Domain {
            what: "beta",
            value: beta,
            domain: "(0, inf)".into(),
        });
    }
    Ok(())
}

// Kept out of line so every caller runs the exact same instruction sequence
// (`powi` may otherwise be expanded differently per call site).
#[inline(never)]
pub(super) fn f_rs_unchecked(p: u32, energy: f64, q: f64, beta: f64) -> f64 {
    let pi = p as i32;
    let pf = p as f64;
    let q2 = q * q;
    let xi_one = 1.0 - q2.powi(pi) - pf * q2.powi(pi - 1) * (1.0 - q2);
    -beta * q.powi(pi) * energy + 0.5 * (-q2).ln_1p() + 0.5 * beta * beta * xi_one
}

/// Replica symmetric TAP free energy
/// `-beta q^p E - I(q) + beta^2/2 (1 - q^2p - p q^(2p-2) (1-q^2))`.
pub fn f_rs(p: ModelOrder, energy: f64, q: f64, beta: f64) -> Result<f64> {
    check_q(q)?;
    check_beta(beta)?;
    Ok(f_rs_unchecked(p.get(), energy, q, beta))
}

/// TAP free energy, available only where the co-dimension 1 model at `q` is
/// replica symmetric at `beta`; there it coincides with [`f_rs`].
pub fn f_tap(p: ModelOrder, energy: f64, q: f64, beta: f64) -> Result<f64> {
    f_tap_with_guard(p, energy, q, beta, super::Tolerances::default().rs_guard)
}

fn f_tap_with_guard(p: ModelOrder, energy: f64, q: f64, beta: f64, guard: f64) -> Result<f64> {
    check_q(q)?;
    check_beta(beta)?;
    let test = rs_test(&MixedModel::codim1(p.get(), q), beta);
    if !test.is_replica_symmetric(guard) {
        return Err(AnalyticsError::OutsideRsRegime { q, beta, value: test.value });
    }
    f_rs(p, energy, q, beta)
}

/// Partial derivatives of `V = F_RS + Theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VGradient {
    pub d_e: f64,
    pub d_q: f64,
}

impl VGradient {
    pub fn norm(&self) -> f64 {
        self.d_e.hypot(self.d_q)
    }
}

pub(super) fn d_q_unchecked(p: u32, energy: f64, q: f64, beta: f64) -> f64 {
    let pf = p as f64;
    let pi = p as i32;
    -beta * pf * q.powi(pi - 1) * energy
        - q / (1.0 - q * q)
        - beta * beta * pf * (pf - 1.0) * q.powi(2 * pi - 3) * (1.0 - q * q)
}

pub(super) fn d_e_unchecked(order: ModelOrder, energy: f64, q: f64, beta: f64) -> f64 {
    -beta * q.powi(order.get() as i32) + complexity_derivative(order, energy)
}

/// Closed-form gradient of `V`. At `E = E_inf` the `E`-derivative is the
/// left derivative (which equals the right one, `Theta'` being continuous).
pub fn v_gradient(p: ModelOrder, energy: f64, q: f64, beta: f64) -> Result<VGradient> {
    check_q(q)?;
    check_beta(beta)?;
    let e_inf = p.e_infinity();
    if energy > e_inf + 1e-12 {
        return Err(AnalyticsError::Domain {
            what: "energy",
            value: energy,
            domain: format!("(-inf, E_inf = {e_inf}]"),
        });
    }
    let energy = energy.min(e_inf);
    Ok(VGradient {
        d_e: d_e_unchecked(p, energy, q, beta),
        d_q: d_q_unchecked(p.get(), energy, q, beta),
    })
}

/// Second derivatives of `V` with respect to `(E, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VHessian {
    pub d_ee: f64,
    pub d_eq: f64,
    pub d_qq: f64,
}

impl VHessian {
    /// General closed form, valid for `E < E_inf` and `0 <= q < 1`.
    pub fn at(p: ModelOrder, energy: f64, q: f64, beta: f64) -> Self {
        let pf = p.as_f64();
        let pi = p.get() as i32;
        let e_inf = p.e_infinity();
        let q2 = q * q;
        let d_ee = -(pf - 2.0) / (2.0 * (pf - 1.0))
            + pf * energy / (2.0 * (pf - 1.0) * (energy * energy - e_inf * e_inf).sqrt());
        let d_eq = -beta * pf * q.powi(pi - 1);
        let d_qq = -beta * pf * (pf - 1.0) * q.powi(pi - 2) * energy
            - (1.0 + q2) / ((1.0 - q2) * (1.0 - q2))
            - beta * beta
                * pf
                * (pf - 1.0)
                * ((2.0 * pf - 3.0) * q.powi(2 * pi - 4) * (1.0 - q2) - 2.0 * q.powi(2 * pi - 2));
        VHessian { d_ee, d_eq, d_qq }
    }

    /// Same Hessian with `d_qq` taken from the reduced form that holds when `q`
    /// solves the fixed-point equation at `(E, beta)`.
    pub fn at_fixed_point(p: ModelOrder, energy: f64, q: f64, beta: f64) -> Self {
        let general = Self::at(p, energy, q, beta);
        VHessian { d_qq: d2q_at_fixed_point(p, energy, q, beta), ..general }
    }

    pub fn det(&self) -> f64 {
        self.d_ee * self.d_qq - self.d_eq * self.d_eq
    }
}

/// `d^2/dq^2 F_RS` at a fixed point, `-beta p^2 q^(p-2) sqrt(E^2-E_inf^2) (q^2 - (p-2)/p) / (1-q^2)`.
pub(super) fn d2q_at_fixed_point(p: ModelOrder, energy: f64, q: f64, beta: f64) -> f64 {
    let pf = p.as_f64();
    let e_inf = p.e_infinity();
    let disc = (energy * energy - e_inf * e_inf).max(0.0).sqrt();
    -beta * pf * pf * q.powi(p.get() as i32 - 2) * disc * (q * q - (pf - 2.0) / pf) / (1.0 - q * q)
}

/// The `beta`-free form of the same quantity,
/// `(2 - p(1-q^2)) / (1-q^2)^2 * [((-E - sqrt(E^2-E_inf^2)) / E_inf)^2 - 1]`.
pub(super) fn d2q_at_fixed_point_beta_free(p: ModelOrder, energy: f64, q: f64) -> f64 {
    let pf = p.as_f64();
    let e_inf = p.e_infinity();
    let one_m = 1.0 - q * q;
    let disc = (energy * energy - e_inf * e_inf).max(0.0).sqrt();
    let ratio = (-energy - disc) / e_inf;
    (2.0 - pf * one_m) / (one_m * one_m) * (ratio * ratio - 1.0)
}

impl SphericalPSpin {
    pub fn f_rs(&self, energy: f64, q: f64, beta: f64) -> Result<f64> {
        f_rs(self.order, energy, q, beta)
    }

    pub fn f_tap(&self, energy: f64, q: f64, beta: f64) -> Result<f64> {
        f_tap_with_guard(self.order, energy, q, beta, self.tol.rs_guard)
    }

    /// `V(E, q, beta) = F_RS + Theta`.
    pub fn v(&self, energy: f64, q: f64, beta: f64) -> Result<f64> {
        Ok(self.f_rs(energy, q, beta)? + self.complexity(energy))
    }

    pub fn v_gradient(&self, energy: f64, q: f64, beta: f64) -> Result<VGradient> {
        v_gradient(self.order, energy, q, beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(p: u32) -> ModelOrder {
        ModelOrder::new(p).unwrap()
    }

    #[test]
    fn rs_value_at_origin_is_annealed() {
        for p in 3..=7 {
            for &b in &[0.3, 1.0, 2.5] {
                assert_eq!(f_rs(order(p), -1.7, 0.0, b).unwrap(), 0.5 * b * b);
            }
        }
    }

    #[test]
    fn rs_value_p3() {
        // direct double-precision evaluation in python: 1.0503983762340097
        let v = f_rs(order(3), -1.6, 0.8, 1.5).unwrap();
        assert!((v - 1.050_398_376_234_01).abs() < 1e-12, "{v}");
    }

    #[test]
    fn rate_function_increases() {
        assert_eq!(rate_function(0.0).unwrap(), 0.0);
        let mut last = 0.0;
        for k in 1..100 {
            let v = rate_function(k as f64 / 100.0).unwrap();
            assert!(v > last);
            last = v;
        }
        assert!(rate_function(1.0).is_err());
        assert!(f_rs(order(3), -1.6, 1.0, 1.0).is_err());
    }

    #[test]
    fn tap_matches_rs_in_regime() {
        let m = SphericalPSpin::new(3).unwrap();
        let q = m.q_double_star(2.0).unwrap();
        let e = m.e_infinity();
        assert_eq!(m.f_tap(e, q, 2.0).unwrap().to_bits(), m.f_rs(e, q, 2.0).unwrap().to_bits());

        let m4 = SphericalPSpin::new(4).unwrap();
        let e = m4.e_zero() + 0.001;
        let beta = 1.0 / 0.8;
        assert!(rs_test(&MixedModel::codim1(4, 0.95), beta).value <= 0.0);
        assert_eq!(m4.f_tap(e, 0.95, beta).unwrap(), m4.f_rs(e, 0.95, beta).unwrap());
    }

    #[test]
    fn tap_refuses_outside_regime() {
        let r = f_tap(order(3), -1.6, 0.2, 3.0);
        assert!(matches!(r, Err(AnalyticsError::OutsideRsRegime { .. })), "{r:?}");
    }

    #[test]
    fn d_q_vanishes_at_fixed_point() {
        let m = SphericalPSpin::new(4).unwrap();
        for &e in &[m.e_zero(), -1.78, m.e_infinity()] {
            let b = 1.3 * m.beta_star(e).unwrap();
            let s = m.solve_fixed_point(e, b).unwrap();
            let g = m.v_gradient(e, s.q_star, b).unwrap();
            assert!(g.d_q.abs() < 1e-10, "{g:?}");
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let m = SphericalPSpin::new(3).unwrap();
        let (e, q, b) = (-1.7, 0.83, 1.4);
        let h = 1e-6;
        let g = m.v_gradient(e, q, b).unwrap();
        let fe = (m.v(e + h, q, b).unwrap() - m.v(e - h, q, b).unwrap()) / (2.0 * h);
        let fq = (m.v(e, q + h, b).unwrap() - m.v(e, q - h, b).unwrap()) / (2.0 * h);
        assert!((g.d_e - fe).abs() < 1e-7 * fe.abs().max(1.0));
        assert!((g.d_q - fq).abs() < 1e-7 * fq.abs().max(1.0));
    }

    #[test]
    fn hessian_matches_finite_differences() {
        let o = order(5);
        let (e, q, b) = (-1.95, 0.9, 1.7);
        let h = 1e-5;
        let hs = VHessian::at(o, e, q, b);
        let gq = |e: f64, q: f64| v_gradient(o, e, q, b).unwrap();
        let fqq = (gq(e, q + h).d_q - gq(e, q - h).d_q) / (2.0 * h);
        let fee = (gq(e + h, q).d_e - gq(e - h, q).d_e) / (2.0 * h);
        let feq = (gq(e, q + h).d_e - gq(e, q - h).d_e) / (2.0 * h);
        assert!((hs.d_qq - fqq).abs() < 1e-6 * fqq.abs().max(1.0));
        assert!((hs.d_ee - fee).abs() < 1e-6 * fee.abs().max(1.0));
        assert!((hs.d_eq - feq).abs() < 1e-6 * feq.abs().max(1.0));
    }

    #[test]
    fn three_forms_of_curvature_at_fixed_point_agree() {
        let m = SphericalPSpin::new(6).unwrap();
        let e = 0.6 * m.e_zero() + 0.4 * m.e_infinity();
        let b = 1.2 * m.beta_star(e).unwrap();
        let q = m.solve_fixed_point(e, b).unwrap().q_star;
        let general = VHessian::at(m.order(), e, q, b).d_qq;
        let reduced = d2q_at_fixed_point(m.order(), e, q, b);
        let free = d2q_at_fixed_point_beta_free(m.order(), e, q);
        assert!(reduced < 0.0);
        assert!((general - reduced).abs() < 1e-8 * reduced.abs());
        assert!((free - reduced).abs() < 1e-8 * reduced.abs());
    }

    #[test]
    fn energy_above_threshold_rejected() {
        assert!(v_gradient(order(3), -1.0, 0.5, 1.0).is_err());
        assert!(v_gradient(order(3), order(3).e_infinity(), 0.5, 1.0).is_ok());
    }
}
