use super::field::Landscape;
use super::rng::{stream, Domain};
use super::{invalid, BandSpec, Result, SimError, SphereState};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const MIN_SAMPLES: usize = 1000;
const MIN_ESS: f64 = 50.0;

/// Annealing schedule: `levels` equally spaced inverse temperatures from 0
/// to `beta`, each followed by `sweeps` random-walk Metropolis moves with
/// proposal scale `step_scale / ((1 + b) sqrt(N))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AisSchedule {
    pub levels: usize,
    pub sweeps: usize,
    pub step_scale: f64,
}

impl Default for AisSchedule {
    fn default() -> Self {
        AisSchedule { levels: 400, sweeps: 5, step_scale: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyEstimate {
    /// `(1/N) log` of the estimated `integral_A exp(-beta H) dx` under the
    /// normalized uniform measure.
    pub estimate: f64,
    pub std_err: f64,
    pub ess: f64,
    pub n_samples: usize,
}

/// One random-walk Metropolis move for the target `exp(-b H)` restricted to
/// `band`. The proposal `normalize(x + sigma xi)` with tangent Gaussian `xi`
/// has a density depending only on the angle between `x` and the proposal, so
/// it is symmetric.
pub(super) fn metropolis_step<L: Landscape + ?Sized, R: Rng + ?Sized>(
    field: &L,
    x: &mut SphereState,
    energy: &mut f64,
    b: f64,
    sigma: f64,
    band: Option<&BandSpec>,
    rng: &mut R,
) -> Result<bool> {
    let mut xi: Vec<f64> = (0..x.dim()).map(|_| sigma * rng.sample::<f64, _>(StandardNormal)).collect();
    x.project_tangent(&mut xi);
    let y = x.retract(&xi)?;
    let u: f64 = rng.random();
    if band.is_some_and(|bd| !bd.contains(&y)) {
        return Ok(false);
    }
    let e = field.energy(y.coords());
    if u.ln() < -b * (e - *energy) {
        *x = y;
        *energy = e;
        Ok(true)
    } else {
        Ok(false)
    }
}

/// Annealed importance sampling estimate of
/// `F_N(A; beta) = (1/N) log integral_A exp(-beta H) dx` with the uniform
/// probability measure on the sphere; `A` is the whole sphere or a band.
///
/// Band chains start from latitude-stratified draws (uniform latitude,
/// uniform direction) weighted by the exact latitude density, so the initial
/// weights already carry the band's measure.
pub fn mc_restricted_free_energy<L: Landscape + ?Sized>(
    field: &L,
    beta: f64,
    band: Option<&BandSpec>,
    n_samples: usize,
    seed: u64,
) -> Result<FreeEnergyEstimate> {
    mc_restricted_free_energy_with(field, beta, band, n_samples, seed, AisSchedule::default())
}

pub fn mc_restricted_free_energy_with<L: Landscape + ?Sized>(
    field: &L,
    beta: f64,
    band: Option<&BandSpec>,
    n_samples: usize,
    seed: u64,
    schedule: AisSchedule,
) -> Result<FreeEnergyEstimate> {
    let n = field.dim();
    if n_samples < MIN_SAMPLES {
        return Err(invalid("n_samples", format!("{n_samples} < {MIN_SAMPLES}")));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(invalid("beta", format!("{beta} must be finite and non-negative")));
    }
    if band.is_some_and(|b| b.dim() != n) {
        return Err(invalid("band", format!("band lives in dimension {}, field in {n}", band.unwrap().dim())));
    }
    if schedule.levels == 0 || !(schedule.step_scale > 0.0) {
        return Err(invalid("schedule", format!("{schedule:?}")));
    }
    let nf = n as f64;
    let anneal = beta > 0.0;

    let log_w: Vec<f64> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, Domain::Sampler, i as u64);
            let (mut x, mut log_w) = match band {
                Some(b) => {
                    let (x, t) = b.sample_latitude(&mut rng);
                    (x, b.log_latitude_weight(t))
                }
                None => (SphereState::uniform(n, &mut rng), 0.0),
            };
            if !anneal {
                return Ok(log_w);
            }
            let mut e = field.energy(x.coords());
            let db = beta / schedule.levels as f64;
            for k in 1..=schedule.levels {
                let b = k as f64 * db;
                log_w -= db * e;
                let sigma = schedule.step_scale / ((1.0 + b) * nf.sqrt());
                for _ in 0..schedule.sweeps {
                    metropolis_step(field, &mut x, &mut e, b, sigma, band, &mut rng)?;
                }
            }
            Ok(log_w)
        })
        .collect::<Result<_>>()?;

    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_w.iter().map(|l| (l - max).exp()).collect();
    let m = n_samples as f64;
    let s1: f64 = w.iter().sum();
    let s2: f64 = w.iter().map(|v| v * v).sum();
    let ess = s1 * s1 / s2;
    if ess < MIN_ESS {
        return Err(SimError::DegenerateSample { ess });
    }
    let mean = s1 / m;
    let var = (s2 / m - mean * mean).max(0.0) * m / (m - 1.0);
    Ok(FreeEnergyEstimate {
        estimate: (max + mean.ln()) / nf,
        std_err: (var / m).sqrt() / mean / nf,
        ess,
        n_samples,
    })
}
