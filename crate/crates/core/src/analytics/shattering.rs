use super::{AnalyticsError, BbmOptimum, ModelOrder, Result, SphericalPSpin};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const GRID_POINTS: usize = 500;
const RADIUS_SLACK: f64 = 1e-3;

/// One temperature of the window scan with the certificate it produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowPoint {
    pub temperature: f64,
    pub optimum: BbmOptimum,
    pub theta_at_opt: f64,
    pub qualifies: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShatteringWindow {
    pub p: u32,
    /// Open lower end, `T_s`.
    pub t_lo: f64,
    /// Largest scanned temperature up to which every grid point is certified.
    pub t_hi: f64,
    /// Largest `E_opt - E0` over the certified part of the scan.
    pub delta0: f64,
    pub separation_radius: f64,
    pub points: Vec<WindowPoint>,
}

/// Separation radius used for the band-disjointness check.
pub fn separation_radius(p: ModelOrder) -> f64 {
    let pf = p.as_f64();
    if p.get() == 3 {
        (pf - 3.0) / (pf - 1.0) + RADIUS_SLACK
    } else {
        (pf - 4.0) / pf + RADIUS_SLACK
    }
}

impl SphericalPSpin {
    fn certify(&self, t: f64, q_min: f64) -> Result<WindowPoint> {
        let beta = 1.0 / t;
        let optimum = self.bbm_maximize(beta)?;
        let theta_at_opt = self.complexity(optimum.e_opt);
        let qualifies = optimum.interior
            && (optimum.value - 0.5 * beta * beta).abs() <= self.tol.free_energy_match
            && theta_at_opt > 0.0
            && optimum.q_opt > q_min;
        Ok(WindowPoint { temperature: t, optimum, theta_at_opt, qualifies })
    }

    pub fn shattering_window(&self) -> Result<ShatteringWindow> {
        let temps = self.critical_temperatures()?;
        let (t_s, t_sh) = (temps.t_s, temps.t_sh);
        let r = separation_radius(self.order);
        let q_min = (0.5 * (1.0 + r)).sqrt();
        let step = (t_sh - t_s) / GRID_POINTS as f64;
        let points: Vec<WindowPoint> = (1..=GRID_POINTS)
            .into_par_iter()
            .map(|i| {
                let t = if i == GRID_POINTS { t_sh } else { t_s + i as f64 * step };
                self.certify(t, q_min)
            })
            .collect::<Result<_>>()?;
        let certified = points.iter().take_while(|w| w.qualifies).count();
        if certified == 0 {
            return Err(AnalyticsError::EmptyWindow(self.p()));
        }
        let e0 = self.e_zero();
        let delta0 = points[..certified]
            .iter()
            .map(|w| w.optimum.e_opt - e0)
            .fold(0.0, f64::max);
        Ok(ShatteringWindow {
            p: self.p(),
            t_lo: t_s,
            t_hi: points[certified - 1].temperature,
            delta0,
            separation_radius: r,
            points,
        })
    }
}

pub fn shattering_window(p: ModelOrder) -> Result<ShatteringWindow> {
    SphericalPSpin::with_tolerances(p, Default::default())?.shattering_window()
}
