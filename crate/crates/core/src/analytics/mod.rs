//! Closed-form and root-finding calculators for the pure spherical p-spin
//! landscape: complexity, fixed points, critical temperatures, replica
//! symmetric TAP free energies and the BBM variational problem.
//!
//! Most entry points exist twice: as a free function taking a [`ModelOrder`]
//! (convenient, recomputes the energy landmarks) and as a method on
//! [`SphericalPSpin`], which caches the landmarks and is what the grid scans use.

mod audits;
mod bbm;
mod complexity;
mod fixed_point;
mod free_energy;
mod metastability;
mod mixed;
mod rs_test;
mod shattering;
mod temperatures;

pub use audits::{envelope_audit, identity_audits, AuditReport, EnvelopeAudit, IdentityCheck};
pub use bbm::{bbm_maximize, BbmOptimum};
pub use complexity::{asymptotic_complexity, complexity_derivative, energy_landmarks, EnergyLandmarks};
pub use fixed_point::{beta_star, solve_fixed_point, FixedPointSolution};
pub use free_energy::{f_rs, f_tap, rate_function, v_gradient, VGradient, VHessian};
pub use metastability::{metastability_bounds, BoundInputs, MetastabilityBounds, UniversalConstants};
pub use mixed::{alpha, binomial, xi_codim1, MixedModel};
pub use rs_test::{rs_test, RsTest};
pub use shattering::{shattering_window, ShatteringWindow, WindowPoint};
pub use temperatures::{critical_temperatures, CriticalTemperatures};

use crate::numerics::NumericsError;
use thiserror::Error;

/// Grid-scan and solver tolerances. The defaults are the values every
/// certificate in this crate is pinned to; the CLI can override them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub quadrature_abs: f64,
    pub root_x: f64,
    pub fixed_point_residual: f64,
    pub rs_guard: f64,
    pub grad_norm: f64,
    pub stationarity: f64,
    pub free_energy_match: f64,
    pub tie_break: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            quadrature_abs: 1e-12,
            root_x: 1e-15,
            fixed_point_residual: 1e-10,
            rs_guard: 1e-10,
            grad_norm: 1e-8,
            stationarity: 1e-8,
            free_energy_match: 1e-6,
            tie_break: 1e-9,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticsError {
    #[error("model order p = {0} is not supported (need p >= 3)")]
    InvalidOrder(u32),
    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: String,
    },
    #[error("no fixed point for E = {energy}, beta = {beta}: beta_*(E) = {beta_star}")]
    NoSolution { energy: f64, beta: f64, beta_star: f64 },
    #[error("co-dimension 1 model at q = {q} fails the replica symmetry test at beta = {beta} (max g = {value:e})")]
    OutsideRsRegime { q: f64, beta: f64, value: f64 },
    #[error("feasible set is empty at T = {temperature} (T_BBM = {t_bbm})")]
    EmptyFeasibleSet { temperature: f64, t_bbm: f64 },
    #[error("no temperature on the scan grid certifies shattering for p = {0}")]
    EmptyWindow(u32),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, AnalyticsError>;

/// Order `p` of the pure spherical p-spin model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModelOrder(u32);

impl ModelOrder {
    pub fn new(p: u32) -> Result<Self> {
        if p < 3 {
            return Err(AnalyticsError::InvalidOrder(p));
        }
        Ok(ModelOrder(p))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// Threshold energy `-2 sqrt((p-1)/p)`.
    pub fn e_infinity(self) -> f64 {
        let p = self.as_f64();
        -2.0 * ((p - 1.0) / p).sqrt()
    }

    /// Shattering (dynamical) temperature `sqrt(p (p-2)^(p-2) / (p-1)^(p-1))`.
    pub fn t_sh(self) -> f64 {
        let p = self.as_f64();
        (p * (p - 2.0).powf(p - 2.0) / (p - 1.0).powf(p - 1.0)).sqrt()
    }

    pub fn beta_sh(self) -> f64 {
        1.0 / self.t_sh()
    }

    /// Lower edge `sqrt((p-2)/p)` of the branch on which `(1-q^2) q^(p-2)` decreases.
    pub fn q_branch_floor(self) -> f64 {
        let p = self.as_f64();
        ((p - 2.0) / p).sqrt()
    }
}

impl std::fmt::Display for ModelOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A pure spherical p-spin model with its energy landmarks computed once.
#[derive(Debug, Clone)]
pub struct SphericalPSpin {
    order: ModelOrder,
    landmarks: EnergyLandmarks,
    tol: Tolerances,
}

impl SphericalPSpin {
    pub fn new(p: u32) -> Result<Self> {
        Self::with_tolerances(ModelOrder::new(p)?, Tolerances::default())
    }

    pub fn with_tolerances(order: ModelOrder, tol: Tolerances) -> Result<Self> {
        let landmarks = complexity::landmarks_with(order, &tol)?;
        Ok(SphericalPSpin { order, landmarks, tol })
    }

    pub fn order(&self) -> ModelOrder {
        self.order
    }

    pub fn p(&self) -> u32 {
        self.order.get()
    }

    pub fn landmarks(&self) -> &EnergyLandmarks {
        &self.landmarks
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn e_zero(&self) -> f64 {
        self.landmarks.e_zero
    }

    pub fn e_infinity(&self) -> f64 {
        self.landmarks.e_infinity
    }

    pub fn complexity(&self, energy: f64) -> f64 {
        complexity::theta(self.order, energy, self.tol.quadrature_abs)
    }
}
