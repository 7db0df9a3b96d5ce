use super::rng::{stream, Domain};
use super::sphere::dot;
use super::{invalid, Result, SimError, SphereState};
use rand::Rng;
use rand_distr::StandardNormal;
use std::io::{Read, Write};
use std::path::Path;

/// Largest number of tensor entries a single field may hold (2 GiB of f64).
pub const MAX_TENSOR_ENTRIES: u128 = 1 << 28;

const MAGIC: &[u8; 8] = b"SPINFLD1";

/// A Hamiltonian on the sphere of radius `sqrt(dim)`.
pub trait Landscape: Sync {
    fn dim(&self) -> usize;

    /// `H(x)`; `x` need not be exactly on the sphere.
    fn energy(&self, x: &[f64]) -> f64;

    /// `H(x)` and the Euclidean gradient of the polynomial extension of `H`.
    fn energy_euclidean_grad(&self, x: &[f64]) -> (f64, Vec<f64>);

    /// `H(x)` and the covariant (tangential) gradient at `x`.
    fn energy_grad(&self, x: &SphereState) -> (f64, Vec<f64>) {
        let (e, mut g) = self.energy_euclidean_grad(x.coords());
        x.project_tangent(&mut g);
        (e, g)
    }
}

/// Pure p-spin Hamiltonian `H(x) = N^{-(p-1)/2} sum J_{i1..ip} x_i1 .. x_ip`
/// with unsymmetrized i.i.d. standard normal couplings.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingField {
    p: u32,
    n: usize,
    seed: u64,
    tensor: Vec<f64>,
}

pub(crate) fn check_size(p: u32, n: usize) -> Result<usize> {
    let entries = (n as u128).checked_pow(p).unwrap_or(u128::MAX);
    if entries > MAX_TENSOR_ENTRIES {
        return Err(SimError::MemoryBound { p, n, entries });
    }
    Ok(entries as usize)
}

/// `out[j] = sum_i x_i v[i * m + j]` for `v` viewed as an `n x m` matrix.
fn contract_first(v: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let m = v.len() / n;
    let mut out = vec![0.0; m];
    for (xi, row) in x.iter().zip(v.chunks_exact(m)) {
        out.iter_mut().zip(row).for_each(|(o, r)| *o += xi * r);
    }
    out
}

/// `out[i] = sum_j v[i * n + j] x_j` for `v` viewed as an `m x n` matrix.
fn contract_last(v: &[f64], x: &[f64]) -> Vec<f64> {
    v.chunks_exact(x.len()).map(|row| dot(row, x)).collect()
}

impl CouplingField {
    /// Draws couplings of order `p >= 2` in dimension `n` from the coupling
    /// stream `index` of `seed`.
    pub(crate) fn sample_stream(p: u32, n: usize, seed: u64, index: u64) -> Result<Self> {
        if p < 2 || n < 2 {
            return Err(invalid("field size", format!("need p >= 2 and N >= 2, got p = {p}, N = {n}")));
        }
        let entries = check_size(p, n)?;
        let mut rng = stream(seed, Domain::Couplings, index);
        let tensor = (0..entries).map(|_| rng.sample(StandardNormal)).collect();
        Ok(CouplingField { p, n, seed, tensor })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn tensor(&self) -> &[f64] {
        &self.tensor
    }

    fn scale(&self) -> f64 {
        (self.n as f64).powf(-0.5 * (self.p as f64 - 1.0))
    }

    /// Dumps the field as a 32-byte header (magic, p, N, seed as little-endian
    /// u64) followed by the tensor as little-endian f64.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.p as u64).to_le_bytes())?;
        w.write_all(&(self.n as u64).to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.tensor.len() * 8);
        for v in &self.tensor {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; 32];
        r.read_exact(&mut header)?;
        if &header[..8] != MAGIC {
            return Err(SimError::Format("bad magic".into()));
        }
        let word = |i: usize| u64::from_le_bytes(header[i..i + 8].try_into().unwrap());
        let (p, n, seed) = (word(8), word(16), word(24));
        let p = u32::try_from(p).map_err(|_| SimError::Format(format!("p = {p}")))?;
        let n = usize::try_from(n).map_err(|_| SimError::Format(format!("N = {n}")))?;
        let entries = check_size(p, n)?;
        let mut bytes = vec![0u8; entries * 8];
        r.read_exact(&mut bytes)?;
        let mut tail = [0u8; 1];
        if r.read(&mut tail)? != 0 {
            return Err(SimError::Format("trailing bytes after tensor".into()));
        }
        let tensor = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        Ok(CouplingField { p, n, seed, tensor })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(f))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

impl Landscape for CouplingField {
    fn dim(&self) -> usize {
        self.n
    }

    fn energy(&self, x: &[f64]) -> f64 {
        let mut v = contract_first(&self.tensor, x);
        for _ in 1..self.p - 1 {
            v = contract_first(&v, x);
        }
        self.scale() * dot(&v, x)
    }

    fn energy_euclidean_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let p = self.p as usize;
        // prefixes[k] has the first k+1 slots contracted with x
        let mut prefixes = Vec::with_capacity(p - 1);
        prefixes.push(contract_first(&self.tensor, x));
        for k in 1..p - 1 {
            let next = contract_first(&prefixes[k - 1], x);
            prefixes.push(next);
        }
        let last = &prefixes[p - 2];
        let energy = dot(last, x);
        // slot s is left open: contract the first s slots from the left and
        // the remaining p-1-s from the right
        let mut grad = last.clone();
        for s in 0..p - 1 {
            let mut v = if s == 0 { contract_last(&self.tensor, x) } else { contract_last(&prefixes[s - 1], x) };
            for _ in s + 1..p - 1 {
                v = contract_last(&v, x);
            }
            grad.iter_mut().zip(&v).for_each(|(g, vi)| *g += vi);
        }
        let c = self.scale();
        grad.iter_mut().for_each(|g| *g *= c);
        (c * energy, grad)
    }
}

/// Pure p-spin field, `p >= 3`, deterministic in `seed`.
pub fn sample_pure_field(p: u32, n: usize, seed: u64) -> Result<CouplingField> {
    if p < 3 {
        return Err(invalid("p", format!("pure fields need p >= 3, got {p}")));
    }
    CouplingField::sample_stream(p, n, seed, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_energy(f: &CouplingField, x: &[f64]) -> f64 {
        let n = f.n;
        let p = f.p as usize;
        let mut total = 0.0;
        for (idx, j) in f.tensor.iter().enumerate() {
            let mut rem = idx;
            let mut prod = *j;
            for _ in 0..p {
                prod *= x[rem % n];
                rem /= n;
            }
            total += prod;
        }
        total * f.scale()
    }

    #[test]
    fn contraction_matches_brute_force() {
        for p in 2..=4 {
            let f = CouplingField::sample_stream(p, 6, 3, 0).unwrap();
            let x = SphereState::uniform(6, &mut stream(1, Domain::Probe, 0));
            let e = f.energy(x.coords());
            assert!((e - brute_energy(&f, x.coords())).abs() < 1e-12);
            let (e2, _) = f.energy_euclidean_grad(x.coords());
            assert!((e - e2).abs() < 1e-12);
        }
    }

    #[test]
    fn euclidean_gradient_matches_finite_differences() {
        let f = CouplingField::sample_stream(3, 7, 5, 0).unwrap();
        let x: Vec<f64> = (0..7).map(|i| 0.3 + 0.1 * i as f64).collect();
        let (_, g) = f.energy_euclidean_grad(&x);
        let h = 1e-6;
        for i in 0..7 {
            let mut a = x.clone();
            let mut b = x.clone();
            a[i] += h;
            b[i] -= h;
            let fd = (f.energy(&a) - f.energy(&b)) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-7 * fd.abs().max(1.0));
        }
    }

    #[test]
    fn euler_identity_for_homogeneous_field() {
        // x . grad H = p H for a degree-p form
        let f = CouplingField::sample_stream(4, 9, 2, 0).unwrap();
        let x = SphereState::uniform(9, &mut stream(4, Domain::Probe, 0));
        let (e, g) = f.energy_euclidean_grad(x.coords());
        assert!((dot(&g, x.coords()) - 4.0 * e).abs() < 1e-10);
        let (_, cg) = f.energy_grad(&x);
        assert!(dot(&cg, x.coords()).abs() < 1e-10);
    }

    #[test]
    fn memory_bound() {
        assert!(matches!(sample_pure_field(3, 646, 0), Err(SimError::MemoryBound { .. })));
        assert!(matches!(sample_pure_field(4, 129, 0), Err(SimError::MemoryBound { .. })));
        assert!(check_size(3, 645).is_ok());
        assert!(check_size(4, 128).is_ok());
    }

    #[test]
    fn binary_round_trip() {
        let f = sample_pure_field(3, 5, 99).unwrap();
        let mut buf = Vec::new();
        f.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), 32 + 125 * 8);
        assert_eq!(&buf[..8], b"SPINFLD1");
        let g = CouplingField::read_from(buf.as_slice()).unwrap();
        assert_eq!(f, g);
        buf[0] = b'X';
        assert!(CouplingField::read_from(buf.as_slice()).is_err());
    }

    #[test]
    fn determinism() {
        assert_eq!(sample_pure_field(3, 8, 1).unwrap(), sample_pure_field(3, 8, 1).unwrap());
        assert_ne!(sample_pure_field(3, 8, 1).unwrap(), sample_pure_field(3, 8, 2).unwrap());
    }
}
