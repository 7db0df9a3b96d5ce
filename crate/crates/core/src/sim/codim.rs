use super::field::{CouplingField, Landscape};
use super::{invalid, Result};
use crate::analytics::alpha;

/// Co-dimension 1 mixed field on the `(N-1)`-sphere: independent pure fields
/// of orders `k = 2..p` weighted by `alpha_k(q) sqrt(N/(N-1))`, so that its
/// covariance is `N xi(R, q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CodimField {
    p: u32,
    q: f64,
    ambient: usize,
    components: Vec<(f64, CouplingField)>,
}

impl CodimField {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `(k, weight)` for every component.
    pub fn weights(&self) -> Vec<(u32, f64)> {
        self.components.iter().map(|(w, f)| (f.p(), *w)).collect()
    }

    /// Dimension `N` of the sphere the slice sits in.
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }
}

impl Landscape for CodimField {
    fn dim(&self) -> usize {
        self.ambient - 1
    }

    fn energy(&self, y: &[f64]) -> f64 {
        self.components.iter().map(|(w, f)| w * f.energy(y)).sum()
    }

    fn energy_euclidean_grad(&self, y: &[f64]) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; y.len()];
        let mut energy = 0.0;
        for (w, f) in &self.components {
            let (e, g) = f.energy_euclidean_grad(y);
            energy += w * e;
            grad.iter_mut().zip(&g).for_each(|(a, b)| *a += w * b);
        }
        (energy, grad)
    }
}

/// Samples the co-dimension 1 field at latitude `q` in ambient dimension `n`.
/// The order-`k` component uses coupling stream `k` of `seed`.
pub fn sample_codim1_field(p: u32, q: f64, n: usize, seed: u64) -> Result<CodimField> {
    if p < 3 {
        return Err(invalid("p", format!("need p >= 3, got {p}")));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(invalid("q", format!("{q} is outside [0, 1]")));
    }
    if n < 3 {
        return Err(invalid("N", format!("need N >= 3, got {n}")));
    }
    let lift = (n as f64 / (n as f64 - 1.0)).sqrt();
    let components = (2..=p)
        .map(|k| Ok((alpha(p, k, q) * lift, CouplingField::sample_stream(k, n - 1, seed, k as u64)?)))
        .collect::<Result<_>>()?;
    Ok(CodimField { p, q, ambient: n, components })
}
