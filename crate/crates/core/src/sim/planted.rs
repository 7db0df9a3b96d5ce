use super::field::{CouplingField, Landscape};
use super::{invalid, Result, SphereState};
use crate::analytics::{binomial, SphericalPSpin};

/// Field conditioned on the north pole `n = sqrt(N) e_1` being a critical
/// point at energy `N E`:
///
/// `H(x) = N E q^p + sum_k sqrt(C(p,k)) q^(p-k) ((N-1)/N)^(k/2) sqrt(N/(N-1)) h_k(x_perp)`
///
/// with `q = x_1 / sqrt(N)` and `h_k` independent pure order-`k` fields on
/// `R^{N-1}`. On each latitude this is `N E q^p` plus the co-dimension 1
/// field at that latitude evaluated at the rescaled projection, and the
/// polynomial form keeps the field smooth across latitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedField {
    p: u32,
    n: usize,
    energy_level: f64,
    seed: u64,
    // (k, sqrt(C(p,k)) ((N-1)/N)^(k/2) sqrt(N/(N-1)), h_k)
    components: Vec<(u32, f64, CouplingField)>,
}

impl PlantedField {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn energy_level(&self) -> f64 {
        self.energy_level
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn center(&self) -> SphereState {
        SphereState::north_pole(self.n)
    }
}

impl Landscape for PlantedField {
    fn dim(&self) -> usize {
        self.n
    }

    fn energy(&self, x: &[f64]) -> f64 {
        let nf = self.n as f64;
        let q = x[0] / nf.sqrt();
        let perp = &x[1..];
        let p = self.p as i32;
        let slice: f64 = self
            .components
            .iter()
            .map(|(k, c, h)| c * q.powi(p - *k as i32) * h.energy(perp))
            .sum();
        nf * self.energy_level * q.powi(p) + slice
    }

    fn energy_euclidean_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let nf = self.n as f64;
        let root_n = nf.sqrt();
        let q = x[0] / root_n;
        let p = self.p as i32;
        let mut grad = vec![0.0; self.n];
        let mut energy = nf * self.energy_level * q.powi(p);
        let mut dq = nf * self.energy_level * p as f64 * q.powi(p - 1);
        for (k, c, h) in &self.components {
            let m = p - *k as i32;
            let (e, g) = h.energy_euclidean_grad(&x[1..]);
            let w = c * q.powi(m);
            energy += w * e;
            if m > 0 {
                dq += c * m as f64 * q.powi(m - 1) * e;
            }
            grad[1..].iter_mut().zip(&g).for_each(|(a, b)| *a += w * b);
        }
        grad[0] = dq / root_n;
        (energy, grad)
    }
}

/// Plants a critical point of normalized energy `energy` at the north pole.
/// Order-`k` slice fields use coupling stream `k` of `seed`.
pub fn plant_critical_field(p: u32, n: usize, energy: f64, seed: u64) -> Result<PlantedField> {
    let model = SphericalPSpin::new(p)?;
    let lo = model.e_zero() - 0.2;
    if !(energy >= lo && energy <= 0.0) {
        return Err(invalid("E", format!("{energy} is outside [E0 - 0.2, 0] = [{lo}, 0]")));
    }
    if n < 3 {
        return Err(invalid("N", format!("need N >= 3, got {n}")));
    }
    let nf = n as f64;
    let components = (2..=p)
        .map(|k| {
            let c = binomial(p, k).sqrt() * ((nf - 1.0) / nf).powf(0.5 * k as f64) * (nf / (nf - 1.0)).sqrt();
            Ok((k, c, CouplingField::sample_stream(k, n - 1, seed, k as u64)?))
        })
        .collect::<Result<_>>()?;
    Ok(PlantedField { p, n, energy_level: energy, seed, components })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::rng::{stream, Domain};
    use crate::sim::sample_codim1_field;

    #[test]
    fn planted_center_is_critical_at_the_planted_energy() {
        for (p, n) in [(3, 20), (4, 12), (5, 8)] {
            let f = plant_critical_field(p, n, -1.6, 4).unwrap();
            let c = f.center();
            let (e, g) = f.energy_grad(&c);
            assert!((e - n as f64 * -1.6).abs() < 1e-12);
            assert!(g.iter().map(|v| v * v).sum::<f64>().sqrt() <= 1e-8 * n as f64);
        }
    }

    #[test]
    fn latitude_slice_is_the_codim_field() {
        // at fixed latitude the planted field is N E q^p + codim field at y(x)
        let (p, n, seed) = (3, 15, 8);
        let f = plant_critical_field(p, n, -1.7, seed).unwrap();
        let q: f64 = 0.6;
        let slice = sample_codim1_field(p, q, n, seed).unwrap();
        let u = SphereState::uniform(n - 1, &mut stream(1, Domain::Probe, 0));
        let r = ((n - 1) as f64).sqrt();
        let scale = (n as f64 * (1.0 - q * q)).sqrt() / r;
        let mut x = vec![q * (n as f64).sqrt()];
        x.extend(u.coords().iter().map(|v| v * scale));
        let direct = f.energy(&x);
        let via_slice = n as f64 * -1.7 * q.powi(3) + slice.energy(u.coords());
        assert!((direct - via_slice).abs() < 1e-10, "{direct} vs {via_slice}");
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let f = plant_critical_field(3, 10, -1.65, 2).unwrap();
        let x = SphereState::uniform(10, &mut stream(3, Domain::Probe, 0));
        let (_, g) = f.energy_euclidean_grad(x.coords());
        let h = 1e-6;
        for i in 0..10 {
            let mut a = x.coords().to_vec();
            let mut b = a.clone();
            a[i] += h;
            b[i] -= h;
            let fd = (f.energy(&a) - f.energy(&b)) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-6 * fd.abs().max(1.0));
        }
    }

    #[test]
    fn energy_window_enforced() {
        assert!(plant_critical_field(3, 8, 0.1, 0).is_err());
        assert!(plant_critical_field(3, 8, -2.0, 0).is_err());
    }
}
