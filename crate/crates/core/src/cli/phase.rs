use super::{CliError, OutputDir};
use crate::analytics::{AnalyticsError, CriticalTemperatures, EnergyLandmarks, SphericalPSpin};
use rayon::prelude::*;
use serde::Serialize;
use std::path::Path;

/// One grid temperature of the phase diagram. The optimum columns are empty
/// where the feasible set is empty (`T > t_bbm`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseRow {
    pub p: u32,
    #[serde(rename = "T")]
    pub t: f64,
    pub beta: f64,
    pub t_s: f64,
    pub t_sh: f64,
    pub t_bbm: f64,
    #[serde(rename = "E_opt")]
    pub e_opt: Option<f64>,
    pub q_opt: Option<f64>,
    #[serde(rename = "V_max")]
    pub v_max: Option<f64>,
    pub theta_at_opt: Option<f64>,
    pub interior: bool,
    pub shattered: bool,
    pub note: String,
}

#[derive(Serialize)]
struct Landmarks<'a> {
    energy: &'a EnergyLandmarks,
    temperatures: &'a CriticalTemperatures,
}

fn row(model: &SphericalPSpin, temps: &CriticalTemperatures, t: f64) -> Result<PhaseRow, CliError> {
    let beta = 1.0 / t;
    let mut r = PhaseRow {
        p: model.p(),
        t,
        beta,
        t_s: temps.t_s,
        t_sh: temps.t_sh,
        t_bbm: temps.t_bbm,
        e_opt: None,
        q_opt: None,
        v_max: None,
        theta_at_opt: None,
        interior: false,
        shattered: false,
        note: String::new(),
    };
    match model.bbm_maximize(beta) {
        Ok(o) => {
            let theta = model.complexity(o.e_opt);
            r.shattered = o.interior
                && (o.value - 0.5 * beta * beta).abs() <= model.tolerances().free_energy_match
                && theta > 0.0
                && t > temps.t_s
                && t <= temps.t_sh;
            r.e_opt = Some(o.e_opt);
            r.q_opt = Some(o.q_opt);
            r.v_max = Some(o.value);
            r.theta_at_opt = Some(theta);
            r.interior = o.interior;
            if !o.interior {
                r.note = "BoundaryMaximizer".into();
            }
        }
        Err(AnalyticsError::EmptyFeasibleSet { .. }) => r.note = "EmptyFeasibleSet".into(),
        Err(e) => return Err(e.into()),
    }
    Ok(r)
}

/// Writes `phase.csv`, `landmarks.json`, `v_gap.dat` (T vs `V_max - beta^2/2`)
/// and `e_opt.dat` (T vs `E_opt`) into `out`.
pub fn run_phase_diagram(p: u32, tmin: f64, tmax: f64, points: usize, out: &Path) -> Result<Vec<PhaseRow>, CliError> {
    if !(tmin > 0.0 && tmin < tmax && tmax.is_finite()) {
        return Err(CliError::Usage(format!("need 0 < tmin < tmax, got [{tmin}, {tmax}]")));
    }
    if points < 2 {
        return Err(CliError::Usage(format!("need at least 2 points, got {points}")));
    }
    let model = SphericalPSpin::new(p)?;
    let temps = model.critical_temperatures()?;
    let step = (tmax - tmin) / (points - 1) as f64;
    let rows: Vec<PhaseRow> = (0..points)
        .into_par_iter()
        .map(|i| {
            let t = if i == points - 1 { tmax } else { tmin + i as f64 * step };
            row(&model, &temps, t)
        })
        .collect::<Result<_, _>>()?;

    let mut dir = OutputDir::create(out, "phase-diagram", 0)?;
    dir.param("p", p);
    dir.param("tmin", tmin);
    dir.param("tmax", tmax);
    dir.param("points", points);
    dir.write_csv("phase.csv", &rows)?;
    dir.write_json("landmarks.json", &Landmarks { energy: model.landmarks(), temperatures: &temps })?;
    let gap: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.v_max.map(|v| (r.t, v - 0.5 * r.beta * r.beta))).collect();
    dir.write_plot("v_gap.dat", ("T", "V_max-beta^2/2"), &gap)?;
    let e: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.e_opt.map(|e| (r.t, e))).collect();
    dir.write_plot("e_opt.dat", ("T", "E_opt"), &e)?;
    dir.finish()?;
    Ok(rows)
}
