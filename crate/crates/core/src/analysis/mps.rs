use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::quantum::gaussian_vector;
use crate::rng::Rng;

/// Largest `c * n` for which MPS states are contracted to dense vectors.
pub const MPS_DENSE_LIMIT: usize = 12;

/// A `(2^n, 2^k, c)` matrix product state: `c` sites of `n` qubits each,
/// bond dimension `2^k`. `sites[i][s]` is the matrix for physical index `s`.
#[derive(Clone, Debug)]
pub struct MpsState {
    n: usize,
    k: usize,
    sites: Vec<Vec<DMatrix<C64>>>,
    amplitudes: DVector<C64>,
}

impl MpsState {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn c(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[Vec<DMatrix<C64>>] {
        &self.sites
    }

    /// Normalised dense vector, site 0 most significant.
    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    /// Singular values across the cut after each of the first `c - 1` sites.
    pub fn schmidt_spectra(&self) -> Vec<Vec<f64>> {
        let d = 1usize << self.n;
        let total = self.amplitudes.len();
        (1..self.c())
            .map(|cut| {
                let rows = d.pow(cut as u32);
                let cols = total / rows;
                // row-major reshape: amplitude index = r * cols + c
                let m = DMatrix::from_fn(rows, cols, |r, c| self.amplitudes[r * cols + c]);
                let mut sv: Vec<f64> = m.singular_values().iter().cloned().collect();
                sv.sort_by(|a, b| b.total_cmp(a));
                sv
            })
            .collect()
    }

    /// Numerical Schmidt ranks across each cut.
    pub fn schmidt_ranks(&self, tol: f64) -> Vec<usize> {
        self.schmidt_spectra().iter().map(|sv| sv.iter().filter(|v| **v > tol).count()).collect()
    }
}

/// Random MPS from Gaussian site tensors, contracted and normalised.
pub fn random_mps(n: usize, k: usize, c: usize, rng: &mut Rng) -> Result<MpsState> {
    if c == 0 || n == 0 {
        return Err(Error::param("MPS needs at least one site of at least one qubit"));
    }
    if c * n > MPS_DENSE_LIMIT {
        return Err(Error::CapExceeded { what: "MPS", n: c * n, cap: MPS_DENSE_LIMIT });
    }
    let d = 1usize << n;
    let bond = 1usize << k;
    let mut sites = Vec::with_capacity(c);
    for i in 0..c {
        let left = if i == 0 { 1 } else { bond };
        let right = if i + 1 == c { 1 } else { bond };
        let mats: Vec<DMatrix<C64>> = (0..d)
            .map(|_| {
                let v = gaussian_vector(left * right, rng);
                DMatrix::from_column_slice(left, right, v.as_slice())
            })
            .collect();
        sites.push(mats);
    }
    // contract left to right: partial[idx] is a 1 x bond row vector
    let mut partial: Vec<DMatrix<C64>> = sites[0].clone();
    for site in &sites[1..] {
        let mut next = Vec::with_capacity(partial.len() * d);
        for p in &partial {
            for m in site {
                next.push(p * m);
            }
        }
        partial = next;
    }
    let amps = DVector::from_iterator(partial.len(), partial.iter().map(|m| m[(0, 0)]));
    let norm = amps.norm();
    if norm == 0.0 {
        return Err(Error::InvalidState("MPS contracted to zero".into()));
    }
    Ok(MpsState { n, k, sites, amplitudes: amps / C64::new(norm, 0.0) })
}
