use super::{CliError, Config, OutputDir};
use crate::analytics::{f_rs, SphericalPSpin};
use crate::sim::{
    exit_time_experiment, field_covariance, mc_restricted_free_energy_with, plant_critical_field, AisSchedule,
    BandSpec, ExitExperiment, SimError,
};
use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;
use std::path::Path;

const Q_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimKind {
    Covariance,
    PlantedBand,
    ExitTimes,
}

impl SimKind {
    fn name(self) -> &'static str {
        match self {
            SimKind::Covariance => "covariance",
            SimKind::PlantedBand => "planted-band",
            SimKind::ExitTimes => "exit-times",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            SimKind::Covariance => &["p", "N", "draws", "overlaps", "q_list", "seed"],
            SimKind::PlantedBand => &[
                "p", "N", "E", "T", "q", "eta", "samples", "replicas", "levels", "sweeps", "step_scale", "seed",
                "override", "compare_full",
            ],
            SimKind::ExitTimes => &[
                "p", "N_list", "E", "T", "q", "eta", "replicas", "horizon", "seed", "dt", "burn_in", "override",
            ],
        }
    }
}

fn bad(key: &str, msg: impl Into<String>) -> CliError {
    CliError::Config { key: key.into(), msg: msg.into() }
}

/// Reads `q`, defaulting to `q*(E, 1/T)`, and checks it against the fixed
/// point unless overridden.
fn resolve_q(cfg: &Config, p: u32, energy: f64, temperature: f64, allow_any: bool) -> Result<f64, CliError> {
    let model = SphericalPSpin::new(p).map_err(|e| bad("p", e.to_string()))?;
    let q_star = model.solve_fixed_point(energy, 1.0 / temperature).map_err(|e| bad("E", e.to_string()));
    match cfg.get::<f64>("q")? {
        Some(q) if allow_any => Ok(q),
        Some(q) => {
            let q_star = q_star?.q_star;
            if (q - q_star).abs() > Q_TOL {
                return Err(bad("q", format!("{q} differs from q*(E, 1/T) = {q_star:.9} (set override = true to allow)")));
            }
            Ok(q)
        }
        None => Ok(q_star?.q_star),
    }
}

fn check_eta(q: f64, eta: f64) -> Result<(), CliError> {
    if !(q > 0.0 && q < 1.0) {
        return Err(bad("q", format!("{q} must lie in (0, 1)")));
    }
    let cap = 0.5 * q.min(1.0 - q);
    if !(eta > 0.0 && eta < cap) {
        return Err(bad("eta", format!("{eta} must lie in (0, min(q, 1-q)/2 = {cap})")));
    }
    Ok(())
}

fn record_config(dir: &mut OutputDir, cfg: &Config) {
    for (k, v) in cfg.entries() {
        dir.param(k, v);
    }
}

/// Loads `config`, runs the experiment and writes `results.csv`,
/// `summary.json` and `manifest.json` into `out`. `seed` and `allow_any_q`
/// take precedence over the config file.
pub fn run_simulate(
    kind: SimKind,
    config: &Path,
    out: &Path,
    seed: Option<u64>,
    allow_any_q: bool,
) -> Result<serde_json::Value, CliError> {
    let cfg = Config::load(config)?;
    cfg.check_keys(kind.keys())?;
    let seed = match seed {
        Some(s) => s,
        None => cfg.get_or("seed", 0u64)?,
    };
    let allow_any_q = allow_any_q || cfg.get_or("override", false)?;
    let mut dir = OutputDir::create(out, kind.name(), seed)?;
    record_config(&mut dir, &cfg);
    dir.param("seed", seed);
    dir.param("override", allow_any_q);
    let summary = match kind {
        SimKind::Covariance => covariance(&cfg, seed, &mut dir)?,
        SimKind::PlantedBand => planted_band(&cfg, seed, allow_any_q, &mut dir)?,
        SimKind::ExitTimes => exit_times(&cfg, seed, allow_any_q, &mut dir)?,
    };
    dir.write_json("summary.json", &summary)?;
    dir.finish()?;
    Ok(summary)
}

#[derive(Serialize)]
struct CovarianceRow {
    model: &'static str,
    q: Option<f64>,
    overlap: f64,
    empirical: f64,
    theory: f64,
    std_err: f64,
    z: f64,
}

fn covariance(cfg: &Config, seed: u64, dir: &mut OutputDir) -> Result<serde_json::Value, CliError> {
    let p = cfg.get_or("p", 3u32)?;
    let n = cfg.require::<usize>("N")?;
    let draws = cfg.get_or("draws", 10_000usize)?;
    let overlaps = cfg.list::<f64>("overlaps")?.unwrap_or_else(|| vec![0.1, 0.3, 0.5, 0.7, 0.9]);
    let q_list = cfg.list::<f64>("q_list")?.unwrap_or_default();
    if let Some(q) = q_list.iter().find(|q| !(**q >= 0.0 && **q < 1.0)) {
        return Err(bad("q_list", format!("{q} is outside [0, 1)")));
    }
    let mut rows = Vec::new();
    for q in std::iter::once(None).chain(q_list.iter().copied().map(Some)) {
        for pr in field_covariance(p, n, draws, &overlaps, q, seed)? {
            rows.push(CovarianceRow {
                model: if q.is_some() { "codim1" } else { "pure" },
                q,
                overlap: pr.overlap,
                empirical: pr.empirical,
                theory: pr.theory,
                std_err: pr.std_err,
                z: pr.z_score(),
            });
        }
    }
    dir.write_csv("results.csv", &rows)?;
    let max_z = rows.iter().map(|r| r.z).fold(0.0, f64::max);
    let max_dev = rows.iter().map(|r| (r.empirical - r.theory).abs()).fold(0.0, f64::max);
    Ok(serde_json::json!({
        "p": p,
        "N": n,
        "draws": draws,
        "probes": rows.len(),
        "max_abs_deviation": max_dev,
        "max_z": max_z,
        "within_3_std_err": max_z < 3.0,
    }))
}

#[derive(Serialize)]
struct BandRow {
    replica: usize,
    field_seed: u64,
    estimate: f64,
    std_err: f64,
    ess: f64,
    prediction: f64,
    deviation: f64,
    full_estimate: Option<f64>,
    full_std_err: Option<f64>,
}

fn planted_band(cfg: &Config, seed: u64, allow_any_q: bool, dir: &mut OutputDir) -> Result<serde_json::Value, CliError> {
    let p = cfg.get_or("p", 3u32)?;
    let n = cfg.require::<usize>("N")?;
    let energy = cfg.require::<f64>("E")?;
    let temperature = cfg.positive("T", cfg.require("T")?)?;
    let q = resolve_q(cfg, p, energy, temperature, allow_any_q)?;
    let eta = cfg.require::<f64>("eta")?;
    check_eta(q, eta)?;
    let samples = cfg.get_or("samples", 2000usize)?;
    let replicas = cfg.get_or("replicas", 1usize)?;
    if replicas == 0 {
        return Err(bad("replicas", "must be at least 1"));
    }
    let default = AisSchedule::default();
    let schedule = AisSchedule {
        levels: cfg.get_or("levels", default.levels)?,
        sweeps: cfg.get_or("sweeps", default.sweeps)?,
        step_scale: cfg.positive("step_scale", cfg.get_or("step_scale", default.step_scale)?)?,
    };
    if schedule.levels == 0 {
        return Err(bad("levels", "must be at least 1"));
    }
    let compare_full = cfg.get_or("compare_full", false)?;
    let beta = 1.0 / temperature;
    let model = SphericalPSpin::new(p).map_err(|e| bad("p", e.to_string()))?;
    let prediction = f_rs(model.order(), energy, q, beta).map_err(|e| bad("q", e.to_string()))?;

    // replicas are independent planted fields; the sampler is parallel inside
    let mut rows = Vec::with_capacity(replicas);
    for r in 0..replicas {
        let field_seed = seed.wrapping_add(r as u64);
        let field = plant_critical_field(p, n, energy, field_seed)?;
        let band = BandSpec::new(field.center(), q, eta)?;
        let wrap = |e: SimError| SimError::Replica { replica: r, source: Box::new(e) };
        let est = mc_restricted_free_energy_with(&field, beta, Some(&band), samples, field_seed, schedule).map_err(wrap)?;
        let full = if compare_full {
            Some(mc_restricted_free_energy_with(&field, beta, None, samples, field_seed, schedule).map_err(wrap)?)
        } else {
            None
        };
        rows.push(BandRow {
            replica: r,
            field_seed,
            estimate: est.estimate,
            std_err: est.std_err,
            ess: est.ess,
            prediction,
            deviation: est.estimate - prediction,
            full_estimate: full.map(|f| f.estimate),
            full_std_err: full.map(|f| f.std_err),
        });
    }
    dir.write_csv("results.csv", &rows)?;
    let m = rows.len() as f64;
    let mean = rows.iter().map(|r| r.estimate).sum::<f64>() / m;
    let std_err = rows.iter().map(|r| r.std_err * r.std_err).sum::<f64>().sqrt() / m;
    let full_mean = compare_full.then(|| rows.iter().filter_map(|r| r.full_estimate).sum::<f64>() / m);
    Ok(serde_json::json!({
        "p": p,
        "N": n,
        "E": energy,
        "T": temperature,
        "beta": beta,
        "q": q,
        "eta": eta,
        "replicas": replicas,
        "estimate": mean,
        "std_err": std_err,
        "prediction": prediction,
        "deviation": mean - prediction,
        "max_abs_deviation": rows.iter().map(|r| r.deviation.abs()).fold(0.0, f64::max),
        "full_sphere_estimate": full_mean,
        "complexity_at_E": model.complexity(energy),
    }))
}

#[derive(Serialize)]
struct ExitRow {
    #[serde(rename = "N")]
    n: usize,
    replica: usize,
    exit_time: f64,
    censored: bool,
}

#[derive(Serialize)]
struct ExitSummaryRow {
    #[serde(rename = "N")]
    n: usize,
    n_replicas: usize,
    mean_log_exit: f64,
    mean_exit_time: f64,
    censored_fraction: f64,
    dt: f64,
    burn_in: usize,
    burn_in_acceptance: f64,
}

fn exit_times(cfg: &Config, seed: u64, allow_any_q: bool, dir: &mut OutputDir) -> Result<serde_json::Value, CliError> {
    let p = cfg.get_or("p", 3u32)?;
    let n_list = cfg.list::<usize>("N_list")?.ok_or_else(|| bad("N_list", "missing"))?;
    if n_list.is_empty() {
        return Err(bad("N_list", "empty"));
    }
    let energy = cfg.require::<f64>("E")?;
    let temperature = cfg.positive("T", cfg.require("T")?)?;
    let q = resolve_q(cfg, p, energy, temperature, allow_any_q)?;
    let eta = cfg.require::<f64>("eta")?;
    check_eta(q, eta)?;
    let mut exp = ExitExperiment::new(p, n_list, energy, temperature, q, eta);
    exp.seed = seed;
    exp.allow_any_q = true; // checked above with the config's key names
    exp.replicas = cfg.get_or("replicas", exp.replicas)?;
    if exp.replicas == 0 {
        return Err(bad("replicas", "must be at least 1"));
    }
    exp.horizon = cfg.positive("horizon", cfg.get_or("horizon", exp.horizon)?)?;
    exp.burn_in = cfg.get_or("burn_in", exp.burn_in)?;
    exp.dt = cfg.get::<f64>("dt")?.map(|dt| cfg.positive("dt", dt)).transpose()?;
    let stats = exit_time_experiment(&exp)?;

    let rows: Vec<ExitRow> = stats
        .par_iter()
        .flat_map_iter(|s| {
            s.exit_times
                .iter()
                .zip(&s.censored)
                .enumerate()
                .map(|(r, (&t, &c))| ExitRow { n: s.n, replica: r, exit_time: t, censored: c })
        })
        .collect();
    dir.write_csv("results.csv", &rows)?;
    let per_n: Vec<ExitSummaryRow> = stats
        .iter()
        .map(|s| ExitSummaryRow {
            n: s.n,
            n_replicas: s.n_replicas,
            mean_log_exit: s.mean_log_exit,
            mean_exit_time: s.mean_exit_time,
            censored_fraction: s.censored_fraction,
            dt: s.dt,
            burn_in: s.burn_in,
            burn_in_acceptance: s.burn_in_acceptance,
        })
        .collect();
    let increasing = per_n.windows(2).all(|w| w[1].mean_log_exit > w[0].mean_log_exit);
    Ok(serde_json::json!({
        "p": p,
        "E": energy,
        "T": temperature,
        "q": q,
        "eta": eta,
        "horizon": exp.horizon,
        "sizes": per_n,
        "mean_log_exit_strictly_increasing": increasing,
    }))
}
