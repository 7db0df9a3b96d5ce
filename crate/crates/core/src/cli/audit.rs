use super::{CliError, OutputDir};
use crate::analytics::{envelope_audit, identity_audits, IdentityCheck, ModelOrder, SphericalPSpin};
use serde::Serialize;
use std::path::Path;

const ENVELOPE_STEP: f64 = 1e-3;
const ENVELOPE_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeSummary {
    pub beta_min: f64,
    pub beta_max: f64,
    pub step: f64,
    pub points: usize,
    pub max_fd_deviation: f64,
    pub max_analytic_deviation: f64,
    pub min_hessian_det: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Contents of `audit.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditSummary {
    pub p: u32,
    pub samples: usize,
    pub seed: u64,
    pub tamper: f64,
    pub checks: Vec<IdentityCheck>,
    pub envelope: EnvelopeSummary,
    pub passed: bool,
}

/// Uniform grid of inverse temperatures at spacing `step` from `1/t_hi` of
/// the certified window up to `1/t_lo`. The upper end is not appended, since
/// an uneven last cell would make the central differences first order.
pub fn envelope_grid(p: u32, step: f64) -> Result<Vec<f64>, CliError> {
    let w = SphericalPSpin::new(p)?.shattering_window()?;
    let (lo, hi) = (1.0 / w.t_hi, 1.0 / w.t_lo);
    let n = ((hi - lo) / step).floor() as usize;
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

/// Runs the identity audits and the envelope audit, writes `audit.json` and
/// fails with [`CliError::AuditFailed`] (after writing) if anything fails.
pub fn run_audit(p: u32, samples: usize, seed: u64, tamper: f64, out: &Path) -> Result<AuditSummary, CliError> {
    if samples == 0 {
        return Err(CliError::Usage("samples must be at least 1".into()));
    }
    let order = ModelOrder::new(p)?;
    let report = identity_audits(order, samples, seed, tamper)?;
    let grid = envelope_grid(p, ENVELOPE_STEP)?;
    let env = envelope_audit(order, &grid)?;
    let envelope = EnvelopeSummary {
        beta_min: grid[0],
        beta_max: grid[grid.len() - 1],
        step: ENVELOPE_STEP,
        points: grid.len(),
        max_fd_deviation: env.max_fd_deviation,
        max_analytic_deviation: env.max_analytic_deviation,
        min_hessian_det: env.min_hessian_det,
        tolerance: ENVELOPE_TOL,
        passed: env.max_fd_deviation <= ENVELOPE_TOL && env.min_hessian_det > 0.0,
    };
    let summary = AuditSummary {
        p,
        samples,
        seed,
        tamper,
        passed: report.passed() && envelope.passed,
        checks: report.checks,
        envelope,
    };

    let mut dir = OutputDir::create(out, "audit", seed)?;
    dir.param("p", p);
    dir.param("samples", samples);
    dir.param("tamper", tamper);
    dir.write_json("audit.json", &summary)?;
    dir.finish()?;

    if !summary.passed {
        let failed: Vec<&str> = summary.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        let mut what = failed.join(", ");
        if !summary.envelope.passed {
            what.push_str(if what.is_empty() { "envelope" } else { ", envelope" });
        }
        return Err(CliError::AuditFailed(what));
    }
    Ok(summary)
}
