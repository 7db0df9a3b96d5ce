use super::field::Landscape;
use super::rng::{stream, Domain};
use super::{BandSpec, Result, SimError, SphereState};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Settings of one Langevin trajectory. `temperature = f64::INFINITY`
/// switches the drift off; `noise = false` gives the deterministic gradient
/// flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LangevinConfig {
    pub temperature: f64,
    /// Time step; `None` picks [`default_dt`] at the initial state.
    pub dt: Option<f64>,
    pub steps: usize,
    pub seed: u64,
    /// Replica index, selects the noise stream.
    pub replica: u64,
    pub noise: bool,
    pub stop_on_exit: bool,
    /// Record energy and overlap every `record_stride` steps (0 = never).
    pub record_stride: usize,
}

impl LangevinConfig {
    pub fn new(temperature: f64, steps: usize, seed: u64) -> Self {
        LangevinConfig {
            temperature,
            dt: None,
            steps,
            seed,
            replica: 0,
            noise: true,
            stop_on_exit: false,
            record_stride: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub final_state: SphereState,
    pub dt: f64,
    pub steps_taken: usize,
    pub times: Vec<f64>,
    /// `H(x_t) / N` at the recorded times.
    pub energies: Vec<f64>,
    /// `R(x_t, band center)` at the recorded times, when a band is given.
    pub overlaps: Vec<f64>,
    /// First time the trajectory is found outside the band.
    pub exit_time: Option<f64>,
}

/// `0.01 T / (1 + |grad H(x0)|_inf / N)`; at infinite temperature `T` is replaced by 1.
pub fn default_dt<L: Landscape + ?Sized>(field: &L, x0: &SphereState, temperature: f64) -> f64 {
    let (_, g) = field.energy_grad(x0);
    let sup = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let t = if temperature.is_finite() { temperature } else { 1.0 };
    0.01 * t / (1.0 + sup / x0.dim() as f64)
}

/// Projected Euler–Maruyama for `dX = dB - (1/(2T)) grad H dt` on the sphere
/// of radius `sqrt(N)`, whose invariant law is the Gibbs measure
/// `exp(-H/T) dx`. Each step adds the drift and `sqrt(dt)` times tangent
/// Gaussian noise, then renormalizes.
pub fn langevin_run<L: Landscape + ?Sized>(
    field: &L,
    x0: SphereState,
    band: Option<&BandSpec>,
    cfg: &LangevinConfig,
) -> Result<Trajectory> {
    let n = field.dim();
    if x0.dim() != n || band.is_some_and(|b| b.dim() != n) {
        return Err(super::invalid("dimension", format!("field has N = {n}, state has {}", x0.dim())));
    }
    if !(cfg.temperature > 0.0) {
        return Err(super::invalid("temperature", format!("{} must be positive", cfg.temperature)));
    }
    let dt = cfg.dt.unwrap_or_else(|| default_dt(field, &x0, cfg.temperature));
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(super::invalid("dt", format!("{dt} must be positive")));
    }
    let drift_coeff = if cfg.temperature.is_finite() { dt / (2.0 * cfg.temperature) } else { 0.0 };
    let limit = (n as f64).sqrt() / 4.0;
    let sqrt_dt = dt.sqrt();
    let mut rng = stream(cfg.seed, Domain::Noise, cfg.replica);

    let mut x = x0;
    let mut traj = Trajectory {
        final_state: x.clone(),
        dt,
        steps_taken: 0,
        times: Vec::new(),
        energies: Vec::new(),
        overlaps: Vec::new(),
        exit_time: None,
    };
    let nf = n as f64;
    for step in 0..=cfg.steps {
        let (e, g) = field.energy_grad(&x);
        if cfg.record_stride > 0 && step % cfg.record_stride == 0 {
            traj.times.push(step as f64 * dt);
            traj.energies.push(e / nf);
            if let Some(b) = band {
                traj.overlaps.push(b.center.overlap(&x));
            }
        }
        if step == cfg.steps {
            break;
        }
        let mut delta: Vec<f64> = g.iter().map(|gi| -drift_coeff * gi).collect();
        let drift = delta.iter().map(|d| d * d).sum::<f64>().sqrt();
        if drift > limit {
            return Err(SimError::Unstable { step, drift, limit });
        }
        if cfg.noise {
            let mut xi: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            x.project_tangent(&mut xi);
            delta.iter_mut().zip(&xi).for_each(|(d, z)| *d += sqrt_dt * z);
        }
        x = x.retract(&delta)?;
        traj.steps_taken = step + 1;
        if let Some(b) = band {
            if traj.exit_time.is_none() && !b.contains(&x) {
                traj.exit_time = Some(traj.steps_taken as f64 * dt);
                if cfg.stop_on_exit {
                    break;
                }
            }
        }
    }
    traj.final_state = x;
    Ok(traj)
}
