use super::field::Landscape;
use super::rng::{stream, Domain};
use super::{invalid, sample_codim1_field, sample_pure_field, Result, SphereState};
use crate::analytics::xi_codim1;
use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Empirical `E[H(x) H(y)] / N` at one probe overlap against its closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceProbe {
    /// Latitude of the co-dimension 1 model, `None` for the pure model.
    pub q: Option<f64>,
    pub overlap: f64,
    pub empirical: f64,
    pub theory: f64,
    pub std_err: f64,
}

impl CovarianceProbe {
    /// `|empirical - theory|` in standard errors.
    pub fn z_score(&self) -> f64 {
        (self.empirical - self.theory).abs() / self.std_err
    }
}

/// Draws `draws` independent fields and estimates `Cov(H(x), H(y)) / N` at
/// pairs of fixed points with the given overlaps. With `q = None` the fields
/// are pure order-`p` fields on the `N`-sphere; otherwise they are the
/// co-dimension 1 fields at latitude `q` on the `(N-1)`-sphere, still
/// normalized by the ambient `N`. Draw `d` takes its field seed from the
/// probe stream `d` of `seed`; the probe points come from the last stream.
pub fn field_covariance(
    p: u32,
    n: usize,
    draws: usize,
    overlaps: &[f64],
    q: Option<f64>,
    seed: u64,
) -> Result<Vec<CovarianceProbe>> {
    if draws < 2 || draws >= u32::MAX as usize {
        return Err(invalid("draws", format!("need 2 <= draws < 2^32 - 1, got {draws}")));
    }
    if let Some(r) = overlaps.iter().find(|r| !(r.abs() <= 1.0)) {
        return Err(invalid("overlap", format!("{r} is outside [-1, 1]")));
    }
    if n < 3 {
        return Err(invalid("N", format!("need N >= 3, got {n}")));
    }
    let dim = if q.is_some() { n - 1 } else { n };
    let mut rng = stream(seed, Domain::Probe, u32::MAX as u64);
    let x = SphereState::uniform(dim, &mut rng);
    let u = SphereState::uniform(dim, &mut rng);
    let probes: Vec<SphereState> = overlaps.iter().map(|&r| x.at_overlap(&u, r)).collect::<Result<_>>()?;

    let products: Vec<Vec<f64>> = (0..draws)
        .into_par_iter()
        .map(|d| {
            let field_seed = stream(seed, Domain::Probe, d as u64).next_u64();
            let field: Box<dyn Landscape> = match q {
                Some(q) => Box::new(sample_codim1_field(p, q, n, field_seed)?),
                None => Box::new(sample_pure_field(p, n, field_seed)?),
            };
            let hx = field.energy(x.coords());
            Ok(probes.iter().map(|y| hx * field.energy(y.coords()) / n as f64).collect())
        })
        .collect::<Result<_>>()?;

    let m = draws as f64;
    Ok(overlaps
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let mean = products.iter().map(|v| v[i]).sum::<f64>() / m;
            let var = products.iter().map(|v| (v[i] - mean).powi(2)).sum::<f64>() / (m - 1.0);
            // the probes are built exactly at overlap r up to rounding
            let overlap = x.overlap(&probes[i]);
            let theory = match q {
                Some(q) => xi_codim1(p, overlap, q),
                None => overlap.powi(p as i32),
            };
            CovarianceProbe { q, overlap: r, empirical: mean, theory, std_err: (var / m).sqrt() }
        })
        .collect())
}
