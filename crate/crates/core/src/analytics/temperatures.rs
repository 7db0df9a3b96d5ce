use super::{rs_test, MixedModel, ModelOrder, Result, SphericalPSpin};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalTemperatures {
    pub p: u32,
    /// Static transition: below it the pure model is no longer replica symmetric.
    pub t_s: f64,
    /// Shattering (dynamical) temperature.
    pub t_sh: f64,
    /// `1 / beta_*(E0)`; above it no fixed point exists at any `E` in `[E0, E_inf]`.
    pub t_bbm: f64,
    /// `1 / beta_*(E_inf)`.
    pub t_beta_star_einf: f64,
}

impl CriticalTemperatures {
    pub fn is_ordered(&self) -> bool {
        self.t_s < self.t_sh && self.t_sh < self.t_beta_star_einf && self.t_beta_star_einf < self.t_bbm
    }
}

/// Largest `beta` at which the pure model passes the replica symmetry test,
/// bisected on `[1e-3, 10]` to width `xtol`.
pub(super) fn beta_s(p: u32, guard: f64, xtol: f64) -> f64 {
    let model = MixedModel::pure(p);
    let rs = |b: f64| rs_test(&model, b).is_replica_symmetric(guard);
    let (mut lo, mut hi) = (1e-3, 10.0);
    debug_assert!(rs(lo) && !rs(hi));
    while hi - lo > xtol {
        let mid = 0.5 * (lo + hi);
        if rs(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl SphericalPSpin {
    pub fn critical_temperatures(&self) -> Result<CriticalTemperatures> {
        Ok(CriticalTemperatures {
            p: self.p(),
            t_s: 1.0 / beta_s(self.p(), self.tol.rs_guard, 1e-10),
            t_sh: self.order.t_sh(),
            t_bbm: 1.0 / self.beta_star(self.e_zero())?,
            t_beta_star_einf: 1.0 / self.beta_star(self.e_infinity())?,
        })
    }
}

pub fn critical_temperatures(p: ModelOrder) -> Result<CriticalTemperatures> {
    SphericalPSpin::with_tolerances(p, Default::default())?.critical_temperatures()
}
