use super::free_energy::{d2q_at_fixed_point, d2q_at_fixed_point_beta_free};
use super::{MixedModel, ModelOrder, Result, SphericalPSpin, VHessian};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const REL_TOL: f64 = 1e-9;
const TANGENCY_TOL: f64 = 1e-8;
const FD_TOL: f64 = 1e-6;
const FD_STEP: f64 = 1e-5;

/// Worst case of one identity over all draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub draws: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Arguments of the first draw that violated the identity.
    pub first_failure: Option<String>,
}

impl IdentityCheck {
    fn new(name: &str, tolerance: f64) -> Self {
        IdentityCheck {
            name: name.to_string(),
            draws: 0,
            max_error: 0.0,
            tolerance,
            passed: true,
            first_failure: None,
        }
    }

    fn record(&mut self, error: f64, ok: bool, args: impl FnOnce() -> String) {
        self.draws += 1;
        // NaN must register as a failure, so compare through `!(..)`
        if !(error <= self.max_error) {
            self.max_error = error;
        }
        if !ok && self.passed {
            self.passed = false;
            self.first_failure = Some(args());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub p: u32,
    pub samples: usize,
    pub seed: u64,
    pub checks: Vec<IdentityCheck>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<(&str, &str)> {
        self.checks
            .iter()
            .find_map(|c| c.first_failure.as_deref().map(|f| (c.name.as_str(), f)))
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// `(p-2)(p-1)^2 p^3 (1-q^2)^6 (q^2 + (1-q^2) t)^(2p-6)`.
fn rule_of_signs_closed_form(p: u32, t: f64, q: f64) -> f64 {
    let pf = p as f64;
    let one_m = 1.0 - q * q;
    (pf - 2.0) * (pf - 1.0).powi(2) * pf.powi(3) * one_m.powi(6) * (q * q + one_m * t).powi(2 * p as i32 - 6)
}

/// Randomized checks of the algebraic identities behind the phase portrait.
///
/// `tamper` scales the closed forms, and the complexity entering the
/// finite-difference route, by `1 + tamper`; it exists so that the audit
/// itself can be mutation-tested and is zero in normal use.
pub fn identity_audits(p: ModelOrder, samples: usize, seed: u64, tamper: f64) -> Result<AuditReport> {
    let model = SphericalPSpin::with_tolerances(p, Default::default())?;
    let pu = p.get();
    let pf = p.as_f64();
    let scale = 1.0 + tamper;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut signs = IdentityCheck::new("rule_of_signs", REL_TOL);
    let mut endpoints = IdentityCheck::new("xi_endpoints", REL_TOL);
    let mut curvature = IdentityCheck::new("fixed_point_curvature", REL_TOL);
    let mut tangency = IdentityCheck::new("shattering_tangency", TANGENCY_TOL);
    let mut gradient = IdentityCheck::new("v_gradient_fd", FD_TOL);

    // g(t) = beta_sh^2 t^p + log(1-t) + t and its derivative, at the shattering temperature
    let b2 = scale * p.beta_sh().powi(2);
    let g = |t: f64| b2 * t.powi(pu as i32) + (-t).ln_1p() + t;
    let dg = |t: f64| pf * b2 * t.powi(pu as i32 - 1) - t / (1.0 - t);
    let t0 = (pf - 2.0) / (pf - 1.0);
    let r0 = dg(t0).abs();
    tangency.record(r0, r0 <= TANGENCY_TOL, || format!("t={t0}"));

    let (e0, e_inf) = (model.e_zero(), model.e_infinity());
    for _ in 0..samples {
        let t: f64 = rng.random_range(0.0..1.0);
        let q: f64 = rng.random_range(0.0..0.999);

        // third/fourth-derivative combination of the co-dimension 1 covariance
        let xi = MixedModel::codim1(pu, q);
        let (d2, d3, d4) = (xi.derivative(t, 2), xi.derivative(t, 3), xi.derivative(t, 4));
        let lhs = 3.0 * d3 * d3 - 2.0 * d2 * d4;
        let rhs = scale * rule_of_signs_closed_form(pu, t, q);
        let e = rel_err(lhs, rhs);
        signs.record(e, e <= REL_TOL, || format!("t={t}, q={q}"));

        let q2 = q * q;
        let at_one = scale * (1.0 - q2.powi(pu as i32) - pf * (1.0 - q2) * q2.powi(pu as i32 - 1));
        let e = rel_err(xi.value(1.0), at_one).max(xi.value(0.0).abs());
        endpoints.record(e, e <= REL_TOL, || format!("q={q}"));

        // curvature of F_RS in q at q_*(E, beta): general formula vs reduced closed form
        let energy = rng.random_range(e0..e_inf - 0.01);
        let b_star = model.beta_star(energy)?;
        let beta = b_star * rng.random_range(1.05..3.0);
        let qs = model.solve_fixed_point(energy, beta)?.q_star;
        let general = VHessian::at(p, energy, qs, beta).d_qq;
        let reduced = d2q_at_fixed_point(p, energy, qs, beta);
        let free = scale * d2q_at_fixed_point_beta_free(p, energy, qs);
        let e = rel_err(general, free).max(rel_err(reduced, free));
        let ok = e <= REL_TOL && general < 0.0 && free < 0.0;
        curvature.record(e, ok, || format!("E={energy}, beta={beta}, q*={qs}"));

        // g <= 0 and g' <= 0 on [0, 1), tangent to zero at t0
        let gt = g(t);
        let dgt = dg(t);
        let e = gt.max(dgt).max(0.0);
        tangency.record(e, gt <= 1e-12 && dgt <= 1e-12, || format!("t={t}"));

        // closed-form gradient of V against central differences
        let energy = rng.random_range(e0 - 0.3..e_inf - 0.01);
        let qv: f64 = rng.random_range(0.05..0.95);
        let beta: f64 = rng.random_range(0.5..3.0);
        let grad = model.v_gradient(energy, qv, beta)?;
        let v = |e: f64, q: f64| model.f_rs(e, q, beta).map(|f| f + scale * model.complexity(e));
        let fd_e = (v(energy + FD_STEP, qv)? - v(energy - FD_STEP, qv)?) / (2.0 * FD_STEP);
        let fd_q = (v(energy, qv + FD_STEP)? - v(energy, qv - FD_STEP)?) / (2.0 * FD_STEP);
        let e = ((grad.d_e - fd_e).abs() / fd_e.abs().max(1.0)).max((grad.d_q - fd_q).abs() / fd_q.abs().max(1.0));
        gradient.record(e, e <= FD_TOL, || format!("E={energy}, q={qv}, beta={beta}"));
    }

    Ok(AuditReport {
        p: pu,
        samples,
        seed,
        checks: vec![signs, endpoints, curvature, tangency, gradient],
    })
}

/// Envelope identity along a grid of inverse temperatures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeAudit {
    /// `max |G'(beta) - beta|` with `G'` from central differences of the BBM maximum.
    pub max_fd_deviation: f64,
    /// `max |d/dbeta F_RS - beta|` evaluated in closed form at each optimum.
    pub max_analytic_deviation: f64,
    pub min_hessian_det: f64,
    pub betas: Vec<f64>,
    pub values: Vec<f64>,
}

/// Checks `G'(beta) = beta` for `G(beta) = max V` on an increasing grid of at
/// least three points.
pub fn envelope_audit(p: ModelOrder, beta_grid: &[f64]) -> Result<EnvelopeAudit> {
    let model = SphericalPSpin::with_tolerances(p, Default::default())?;
    let pi = p.get() as i32;
    let pf = p.as_f64();
    let mut values = Vec::with_capacity(beta_grid.len());
    let mut max_analytic: f64 = 0.0;
    let mut min_det = f64::INFINITY;
    for &beta in beta_grid {
        let o = model.bbm_maximize(beta)?;
        let (q, e) = (o.q_opt, o.e_opt);
        let d_beta = -q.powi(pi) * e + beta * (1.0 - q.powi(2 * pi) - pf * q.powi(2 * pi - 2) * (1.0 - q * q));
        max_analytic = max_analytic.max((d_beta - beta).abs());
        min_det = min_det.min(o.hessian_det);
        values.push(o.value);
    }
    let max_fd = (1..beta_grid.len().saturating_sub(1))
        .map(|i| {
            let g = (values[i + 1] - values[i - 1]) / (beta_grid[i + 1] - beta_grid[i - 1]);
            (g - beta_grid[i]).abs()
        })
        .fold(0.0, f64::max);
    Ok(EnvelopeAudit {
        max_fd_deviation: max_fd,
        max_analytic_deviation: max_analytic,
        min_hessian_det: min_det,
        betas: beta_grid.to_vec(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_of_signs_pure_reduction() {
        for p in 3..=8u32 {
            let m = MixedModel::pure(p);
            let t: f64 = 0.37;
            let lhs = 3.0 * m.derivative(t, 3).powi(2) - 2.0 * m.derivative(t, 2) * m.derivative(t, 4);
            let pf = p as f64;
            let expect = pf.powi(3) * (pf - 1.0).powi(2) * (pf - 2.0) * t.powi(2 * p as i32 - 6);
            assert!(rel_err(lhs, expect) < 1e-12);
            assert!(rel_err(rule_of_signs_closed_form(p, t, 0.0), expect) < 1e-14);
        }
    }

    #[test]
    fn audits_pass_for_several_orders() {
        for p in [3, 4, 7] {
            let r = identity_audits(ModelOrder::new(p).unwrap(), 500, 11, 0.0).unwrap();
            assert!(r.passed(), "{r:#?}");
        }
    }

    #[test]
    fn tampering_is_detected() {
        let r = identity_audits(ModelOrder::new(3).unwrap(), 200, 11, 1e-3).unwrap();
        assert!(!r.passed());
        let (name, _) = r.first_failure().unwrap();
        assert_eq!(name, "rule_of_signs");
        assert!(r.checks.iter().all(|c| !c.passed), "{r:#?}");
    }

    #[test]
    fn envelope_near_static_transition() {
        let beta_s = 1.0 / 0.828_805;
        let grid: Vec<f64> = (1..=20).rev().map(|k| beta_s - 1e-3 * k as f64).collect();
        let a = envelope_audit(ModelOrder::new(3).unwrap(), &grid).unwrap();
        assert!(a.max_fd_deviation <= 1e-4, "{a:?}");
        assert!(a.max_analytic_deviation <= 1e-8, "{a:?}");
        assert!(a.min_hessian_det > 0.0);
    }
}
