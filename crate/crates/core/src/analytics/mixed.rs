use super::{AnalyticsError, Result};

/// Binomial coefficient `C(n, k)` as a float.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Weight of the order-`k` component of the co-dimension 1 model at latitude `q`:
/// `sqrt(C(p,k) (1-q^2)^k) q^(p-k)`.
pub fn alpha(p: u32, k: u32, q: f64) -> f64 {
    (binomial(p, k) * (1.0 - q * q).powi(k as i32)).sqrt() * q.powi((p - k) as i32)
}

/// Closed form of the co-dimension 1 covariance,
/// `[(1-q^2) t + q^2]^p - q^(2p) - p (1-q^2) t q^(2p-2)`.
pub fn xi_codim1(p: u32, t: f64, q: f64) -> f64 {
    let q2 = q * q;
    let pi = p as i32;
    ((1.0 - q2) * t + q2).powi(pi) - q2.powi(pi) - p as f64 * (1.0 - q2) * t * q2.powi(pi - 1)
}

/// Mixed spherical model with covariance polynomial `f(t) = sum_k a_k^2 t^k`,
/// `k >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedModel {
    // coeffs[k] = a_k^2; entries 0 and 1 are always zero
    coeffs: Vec<f64>,
}

impl MixedModel {
    /// Builds a model from `a_k^2` for `k = 2, 3, ...` (first entry is `k = 2`).
    pub fn from_squared_weights(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(AnalyticsError::Domain {
                what: "mixture weight",
                value: weights.iter().copied().find(|w| !(w.is_finite() && *w >= 0.0)).unwrap_or(f64::NAN),
                domain: "[0, inf)".into(),
            });
        }
        if !weights.iter().any(|w| *w > 0.0) {
            return Err(AnalyticsError::Domain {
                what: "mixture weight sum",
                value: 0.0,
                domain: "(0, inf)".into(),
            });
        }
        let mut coeffs = vec![0.0, 0.0];
        coeffs.extend_from_slice(weights);
        Ok(MixedModel { coeffs })
    }

    /// Pure model `f(t) = t^p`.
    pub fn pure(p: u32) -> Self {
        let mut coeffs = vec![0.0; p as usize + 1];
        coeffs[p as usize] = 1.0;
        MixedModel { coeffs }
    }

    /// Co-dimension 1 model `xi(., q)` with `a_k^2 = alpha_k(q)^2`, `k = 2..p`.
    /// At `q = 1` every weight vanishes; the model is still returned (it is the
    /// zero field) because callers probe that limit.
    pub fn codim1(p: u32, q: f64) -> Self {
        let mut coeffs = vec![0.0; p as usize + 1];
        for k in 2..=p {
            let a = alpha(p, k, q);
            coeffs[k as usize] = a * a;
        }
        MixedModel { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `a_k^2` for `k = 0..=degree`.
    pub fn squared_weights(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self, t: f64) -> f64 {
        self.derivative(t, 0)
    }

    /// `order`-th derivative of `f` at `t`, by Horner on the differentiated
    /// coefficients.
    pub fn derivative(&self, t: f64, order: usize) -> f64 {
        let n = self.coeffs.len();
        if order >= n {
            return 0.0;
        }
        let mut acc = 0.0;
        for k in (order..n).rev() {
            let falling: f64 = (0..order).map(|j| (k - j) as f64).product();
            acc = acc * t + self.coeffs[k] * falling;
        }
        acc
    }

    pub fn at_one(&self) -> f64 {
        self.coeffs.iter().sum()
    }
}
