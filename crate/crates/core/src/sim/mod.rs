//! Desk-scale stochastic realization of the p-spin landscape: Gaussian
//! coupling tensors, fields planted at a critical point, sphere-constrained
//! Langevin dynamics, band free energies and exit-time experiments.
//!
//! Every random quantity is drawn from a ChaCha stream keyed by
//! `(seed, domain, index)`, so replicas can run in any order or in parallel
//! and still reproduce bit-for-bit.

mod codim;
mod covariance;
mod descent;
mod exit;
mod field;
mod free_energy;
mod langevin;
mod planted;
pub mod rng;
mod sphere;

pub use codim::{sample_codim1_field, CodimField};
pub use covariance::{field_covariance, CovarianceProbe};
pub use descent::{descend_to_critical, DescentResult};
pub use exit::{exit_time_experiment, metropolis_in_band, ExitExperiment, ExitStats};
pub use field::{sample_pure_field, CouplingField, Landscape, MAX_TENSOR_ENTRIES};
pub use free_energy::{mc_restricted_free_energy, mc_restricted_free_energy_with, AisSchedule, FreeEnergyEstimate};
pub use langevin::{default_dt, langevin_run, LangevinConfig, Trajectory};
pub use planted::{plant_critical_field, PlantedField};
pub use sphere::{BandSpec, SphereState};

use crate::analytics::AnalyticsError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("N^p = {n}^{p} = {entries} tensor entries exceeds the bound {}", MAX_TENSOR_ENTRIES)]
    MemoryBound { p: u32, n: usize, entries: u128 },
    #[error("invalid {what}: {detail}")]
    InvalidArgument { what: &'static str, detail: String },
    #[error("integrator unstable at step {step}: drift step {drift:.3e} exceeds sqrt(N)/4 = {limit:.3e}; reduce dt")]
    Unstable { step: usize, drift: f64, limit: f64 },
    #[error("effective sample size {ess:.1} is below 50")]
    DegenerateSample { ess: f64 },
    #[error("descent stopped after {iters} iterations with |grad|/N = {grad_norm:e}")]
    NotConverged { best: Box<DescentResult>, iters: usize, grad_norm: f64 },
    #[error("replica {replica}: {source}")]
    Replica {
        replica: usize,
        #[source]
        source: Box<SimError>,
    },
    #[error("field file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
}

pub type Result<T> = std::result::Result<T, SimError>;

pub(crate) fn invalid(what: &'static str, detail: impl Into<String>) -> SimError {
    SimError::InvalidArgument { what, detail: detail.into() }
}
