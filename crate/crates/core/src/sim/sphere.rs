use super::{invalid, Result};
use crate::numerics::ln_gamma_half_integer;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// A point on the sphere of radius `sqrt(N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereState {
    coords: Vec<f64>,
}

// four independent partial sums so the loop vectorizes
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    let mut acc = [0.0; 4];
    for (u, v) in ca.zip(cb) {
        for i in 0..4 {
            acc[i] += u[i] * v[i];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

impl SphereState {
    /// Rescales `coords` onto the sphere. Fails for an empty or zero vector.
    pub fn new(mut coords: Vec<f64>) -> Result<Self> {
        let norm = dot(&coords, &coords).sqrt();
        if coords.len() < 2 || !(norm > 0.0 && norm.is_finite()) {
            return Err(invalid("sphere state", format!("cannot project a vector of norm {norm} in dimension {}", coords.len())));
        }
        let scale = (coords.len() as f64).sqrt() / norm;
        coords.iter_mut().for_each(|c| *c *= scale);
        Ok(SphereState { coords })
    }

    /// `sqrt(N) e_1`.
    pub fn north_pole(n: usize) -> Self {
        let mut coords = vec![0.0; n];
        coords[0] = (n as f64).sqrt();
        SphereState { coords }
    }

    pub fn uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            if let Ok(s) = Self::new(v) {
                return s;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// `R(x, y) = x . y / N`.
    pub fn overlap(&self, other: &SphereState) -> f64 {
        dot(&self.coords, &other.coords) / self.dim() as f64
    }

    /// Relative deviation of the norm from `sqrt(N)`.
    pub fn norm_error(&self) -> f64 {
        let n = self.dim() as f64;
        (dot(&self.coords, &self.coords).sqrt() / n.sqrt() - 1.0).abs()
    }

    /// Removes the radial component of `v` in place: `(I - x x^T / N) v`.
    pub fn project_tangent(&self, v: &mut [f64]) {
        let c = dot(&self.coords, v) / self.dim() as f64;
        v.iter_mut().zip(&self.coords).for_each(|(vi, xi)| *vi -= c * xi);
    }

    /// Moves along `step` and maps back onto the sphere.
    pub fn retract(&self, step: &[f64]) -> Result<Self> {
        Self::new(self.coords.iter().zip(step).map(|(x, s)| x + s).collect())
    }

    /// Point at overlap `r` with `self` in the direction of `other`'s
    /// component orthogonal to `self`.
    pub fn at_overlap(&self, other: &SphereState, r: f64) -> Result<Self> {
        let mut u = other.coords.clone();
        self.project_tangent(&mut u);
        let u = Self::new(u)?;
        let s = (1.0 - r * r).max(0.0).sqrt();
        Self::new(self.coords.iter().zip(&u.coords).map(|(x, y)| r * x + s * y).collect())
    }
}

/// `B(center, q, eta) = { y : |R(center, y) - q| <= eta }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandSpec {
    pub center: SphereState,
    pub q: f64,
    pub eta: f64,
}

impl BandSpec {
    pub fn new(center: SphereState, q: f64, eta: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(invalid("band", format!("q = {q} must lie in (0, 1)")));
        }
        let cap = 0.5 * q.min(1.0 - q);
        if !(eta > 0.0 && eta < cap) {
            return Err(invalid("band", format!("eta = {eta} must lie in (0, min(q, 1-q)/2 = {cap})")));
        }
        Ok(BandSpec { center, q, eta })
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn contains(&self, x: &SphereState) -> bool {
        (self.center.overlap(x) - self.q).abs() <= self.eta
    }

    pub fn latitude_range(&self) -> (f64, f64) {
        (self.q - self.eta, self.q + self.eta)
    }

    /// Draws a latitude `t` uniformly from `[q - eta, q + eta]` and a uniform
    /// direction orthogonal to the center, returning the point and `t`.
    pub fn sample_latitude<R: Rng + ?Sized>(&self, rng: &mut R) -> (SphereState, f64) {
        let t = rng.random_range(self.q - self.eta..=self.q + self.eta);
        let u = SphereState::uniform(self.dim(), rng);
        let x = self
            .center
            .at_overlap(&u, t)
            .expect("a Gaussian vector is almost surely not parallel to the center");
        (x, t)
    }

    /// `log` of the uniform-measure density of the latitude `t` relative to the
    /// uniform draw of [`sample_latitude`](Self::sample_latitude):
    /// `log(2 eta c_N (1 - t^2)^((N-3)/2))` with `c_N = Gamma(N/2) / (sqrt(pi) Gamma((N-1)/2))`.
    pub fn log_latitude_weight(&self, t: f64) -> f64 {
        let n = self.dim();
        let log_c = ln_gamma_half_integer(n) - 0.5 * std::f64::consts::PI.ln() - ln_gamma_half_integer(n - 1);
        (2.0 * self.eta).ln() + log_c + 0.5 * (n as f64 - 3.0) * (-t * t).ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::rng::{stream, Domain};

    #[test]
    fn states_live_on_the_sphere() {
        let mut rng = stream(1, Domain::Start, 0);
        for n in [2, 5, 64, 301] {
            let s = SphereState::uniform(n, &mut rng);
            assert!(s.norm_error() < 1e-12);
        }
        assert!(SphereState::new(vec![0.0; 4]).is_err());
    }

    #[test]
    fn overlap_construction() {
        let mut rng = stream(1, Domain::Start, 1);
        let x = SphereState::uniform(40, &mut rng);
        let u = SphereState::uniform(40, &mut rng);
        for r in [-0.4, 0.0, 0.3, 0.99] {
            let y = x.at_overlap(&u, r).unwrap();
            assert!((x.overlap(&y) - r).abs() < 1e-12);
            assert!(y.norm_error() < 1e-12);
        }
    }

    #[test]
    fn band_width_is_validated() {
        let c = SphereState::north_pole(10);
        assert!(BandSpec::new(c.clone(), 0.8, 0.09).is_ok());
        assert!(BandSpec::new(c.clone(), 0.8, 0.1).is_err());
        assert!(BandSpec::new(c.clone(), 0.8, 0.0).is_err());
        assert!(BandSpec::new(c, 1.0, 0.01).is_err());
    }

    #[test]
    fn tangent_projection() {
        let mut rng = stream(2, Domain::Start, 0);
        let x = SphereState::uniform(30, &mut rng);
        let mut v: Vec<f64> = (0..30).map(|i| (i as f64).sin()).collect();
        x.project_tangent(&mut v);
        assert!(dot(x.coords(), &v).abs() < 1e-12);
    }
}
