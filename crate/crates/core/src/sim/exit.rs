use super::field::Landscape;
use super::free_energy::metropolis_step;
use super::langevin::{langevin_run, LangevinConfig};
use super::rng::{stream, Domain};
use super::{invalid, plant_critical_field, BandSpec, Result, SimError, SphereState};
use crate::analytics::SphericalPSpin;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const FIXED_POINT_TOL: f64 = 1e-6;
const TARGET_ACCEPTANCE: f64 = 0.3;

/// Escape-time experiment around a planted critical point: for every `N` in
/// `n_list` a field is planted at energy `E` and `replicas` trajectories are
/// started inside `B(n, q, eta)` and run until they leave or reach `horizon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitExperiment {
    pub p: u32,
    pub n_list: Vec<usize>,
    pub energy: f64,
    pub temperature: f64,
    pub q: f64,
    pub eta: f64,
    pub replicas: usize,
    /// Horizon in SDE time units.
    pub horizon: f64,
    pub seed: u64,
    /// Integrator step; `None` uses the default step at the planted center.
    pub dt: Option<f64>,
    pub burn_in: usize,
    /// Skip the check `q = q*(E, 1/T)`.
    pub allow_any_q: bool,
}

impl ExitExperiment {
    pub fn new(p: u32, n_list: Vec<usize>, energy: f64, temperature: f64, q: f64, eta: f64) -> Self {
        ExitExperiment {
            p,
            n_list,
            energy,
            temperature,
            q,
            eta,
            replicas: 64,
            horizon: 50.0,
            seed: 0,
            dt: None,
            burn_in: 10_000,
            allow_any_q: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() || self.replicas == 0 {
            return Err(invalid("N_list", "need at least one N and one replica"));
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(invalid("T", format!("{} must be positive and finite", self.temperature)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(invalid("horizon", format!("{} must be positive", self.horizon)));
        }
        if !self.allow_any_q {
            let model = SphericalPSpin::new(self.p)?;
            let q_star = model.solve_fixed_point(self.energy, 1.0 / self.temperature)?.q_star;
            if (q_star - self.q).abs() > FIXED_POINT_TOL {
                return Err(invalid("q", format!("{} differs from q*(E, 1/T) = {q_star:.9}", self.q)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitStats {
    pub n: usize,
    pub n_replicas: usize,
    /// First exit times; censored replicas report the horizon.
    pub exit_times: Vec<f64>,
    pub censored: Vec<bool>,
    /// Mean of `log exit_time`, a lower bound when anything is censored.
    pub mean_log_exit: f64,
    pub mean_exit_time: f64,
    pub censored_fraction: f64,
    pub dt: f64,
    pub burn_in: usize,
    pub burn_in_acceptance: f64,
}

/// Metropolis chain for `exp(-H/T)` restricted to `band`, started at `x0`.
/// The proposal scale is tuned towards 30% acceptance every 100 steps.
/// Returns the final state and the overall acceptance rate.
pub fn metropolis_in_band<L: Landscape + ?Sized>(
    field: &L,
    band: &BandSpec,
    temperature: f64,
    x0: SphereState,
    steps: usize,
    seed: u64,
    replica: u64,
) -> Result<(SphereState, f64)> {
    if !band.contains(&x0) {
        return Err(invalid("start state", "outside the band"));
    }
    let mut rng = stream(seed, Domain::Metropolis, replica);
    let beta = 1.0 / temperature;
    let mut x = x0;
    let mut e = field.energy(x.coords());
    let mut sigma = 1.0 / (field.dim() as f64).sqrt();
    let (mut total, mut window) = (0usize, 0usize);
    for step in 1..=steps {
        let acc = metropolis_step(field, &mut x, &mut e, beta, sigma, Some(band), &mut rng)? as usize;
        total += acc;
        window += acc;
        if step % 100 == 0 {
            let rate = window as f64 / 100.0;
            sigma *= if rate > TARGET_ACCEPTANCE { 1.1 } else { 0.9 };
            window = 0;
        }
    }
    Ok((x, if steps == 0 { 1.0 } else { total as f64 / steps as f64 }))
}

fn run_size(exp: &ExitExperiment, n: usize) -> Result<ExitStats> {
    let field = plant_critical_field(exp.p, n, exp.energy, exp.seed)?;
    let band = BandSpec::new(field.center(), exp.q, exp.eta)?;
    let dt = exp.dt.unwrap_or(0.01 * exp.temperature);
    let steps = ((exp.horizon / dt).floor() as usize).max(1);
    let base = (n as u64) << 24;
    let runs: Vec<(f64, bool, f64)> = (0..exp.replicas)
        .into_par_iter()
        .map(|r| {
            let index = base | r as u64;
            let wrap = |e: SimError| SimError::Replica { replica: r, source: Box::new(e) };
            let (start, _) = band.sample_latitude(&mut stream(exp.seed, Domain::Start, index));
            let (x0, acc) =
                metropolis_in_band(&field, &band, exp.temperature, start, exp.burn_in, exp.seed, index).map_err(wrap)?;
            let cfg = LangevinConfig {
                dt: Some(dt),
                replica: index,
                stop_on_exit: true,
                record_stride: 0,
                ..LangevinConfig::new(exp.temperature, steps, exp.seed)
            };
            let traj = langevin_run(&field, x0, Some(&band), &cfg).map_err(wrap)?;
            Ok(match traj.exit_time {
                Some(t) => (t, false, acc),
                None => (exp.horizon, true, acc),
            })
        })
        .collect::<Result<_>>()?;
    let m = exp.replicas as f64;
    let exit_times: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let censored: Vec<bool> = runs.iter().map(|r| r.1).collect();
    Ok(ExitStats {
        n,
        n_replicas: exp.replicas,
        mean_log_exit: exit_times.iter().map(|t| t.ln()).sum::<f64>() / m,
        mean_exit_time: exit_times.iter().sum::<f64>() / m,
        censored_fraction: censored.iter().filter(|c| **c).count() as f64 / m,
        burn_in_acceptance: runs.iter().map(|r| r.2).sum::<f64>() / m,
        exit_times,
        censored,
        dt,
        burn_in: exp.burn_in,
    })
}

/// Runs the experiment for every `N` in order. Replica `r` at size `N` uses
/// stream index `(N << 24) | r` in the start, burn-in and noise domains.
pub fn exit_time_experiment(exp: &ExitExperiment) -> Result<Vec<ExitStats>> {
    exp.validate()?;
    exp.n_list.iter().map(|&n| run_size(exp, n)).collect()
}
