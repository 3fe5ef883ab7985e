//! Dense states, POVMs and outcome distributions.
//!
//! Everything here materialises `2^n x 2^n` matrices and is guarded by
//! [`dense_cap`](crate::pauli::dense_cap). Distributions for Bell sampling are
//! computed from Pauli spectra instead, so they never build the two-copy
//! operator.

use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{all_paulis, check_cap, symplectic_fourier, PauliString};
use crate::rng::Rng;

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-9;

fn dim_qubits(d: usize) -> Option<usize> {
    d.is_power_of_two().then(|| d.trailing_zeros() as usize)
}

fn is_hermitian(m: &DMatrix<C64>, tol: f64) -> bool {
    let d = m.nrows();
    (0..d).all(|r| (r..d).all(|c| (m[(r, c)] - m[(c, r)].conj()).norm() <= tol))
}

pub(crate) fn min_eigenvalue(m: &DMatrix<C64>) -> f64 {
    m.clone().symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    m: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        let d = m.nrows();
        if m.ncols() != d {
            return Err(Error::InvalidState("matrix is not square".into()));
        }
        let n = dim_qubits(d).ok_or_else(|| Error::InvalidState(format!("dimension {d} is not a power of two")))?;
        check_cap("density matrix", n)?;
        if !is_hermitian(&m, HERMITIAN_TOL) {
            return Err(Error::InvalidState("not Hermitian".into()));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let lo = min_eigenvalue(&m);
        if lo < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {lo:e}")));
        }
        Ok(DensityMatrix { n, m })
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_cap("density matrix", n)?;
        let d = 1usize << n;
        Ok(DensityMatrix { n, m: DMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        check_cap("density matrix", self.n + other.n)?;
        Ok(DensityMatrix { n: self.n + other.n, m: self.m.kronecker(&other.m) })
    }

    pub fn purity(&self) -> f64 {
        self.m.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        let data = self.m.transpose().iter().map(|v| [v.re, v.im]).collect();
        Ok(serde_json::to_string(&DensityJson { n: self.n, data })?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: DensityJson = serde_json::from_str(s)?;
        let d = 1usize << j.n;
        if j.data.len() != d * d {
            return Err(Error::InvalidState(format!("expected {} entries, got {}", d * d, j.data.len())));
        }
        Self::new(DMatrix::from_row_iterator(d, d, j.data.iter().map(|&[re, im]| C64::new(re, im))))
    }
}

/// Row-major list of `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
struct DensityJson {
    n: usize,
    data: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n: usize,
    amps: DVector<C64>,
}

impl PureState {
    pub fn new(amps: DVector<C64>) -> Result<Self> {
        let n = dim_qubits(amps.len()).ok_or_else(|| Error::InvalidState("length is not a power of two".into()))?;
        let norm = amps.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("norm {norm}")));
        }
        Ok(PureState { n, amps })
    }

    /// Computational basis state; `bits[0]` is qubit 0.
    pub fn product(bits: &[bool]) -> Result<Self> {
        let n = bits.len();
        check_cap("pure state", n)?;
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        let mut amps = DVector::zeros(1 << n);
        amps[idx] = C64::new(1.0, 0.0);
        Ok(PureState { n, amps })
    }

    pub fn ghz(n: usize) -> Result<Self> {
        check_cap("pure state", n)?;
        let mut amps = DVector::zeros(1 << n);
        let a = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amps[0] = a;
        amps[(1 << n) - 1] = a;
        Ok(PureState { n, amps })
    }

    pub fn haar_random(n: usize, rng: &mut Rng) -> Result<Self> {
        check_cap("pure state", n)?;
        let v = gaussian_vector(1 << n, rng);
        let norm = v.norm();
        Ok(PureState { n, amps: v / C64::new(norm, 0.0) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        if p.n() != self.n {
            return Err(Error::SizeMismatch { left: self.n, right: p.n() });
        }
        Ok(p.expectation_pure(self.amps.as_slice()))
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix { n: self.n, m: &self.amps * self.amps.adjoint() }
    }

    /// `<psi|P|psi>` for every `P`, indexed by `PauliIndex`.
    pub fn pauli_spectrum(&self) -> Vec<f64> {
        all_paulis(self.n).map(|p| p.expectation_pure(self.amps.as_slice())).collect()
    }
}

pub(crate) fn gaussian_vector(d: usize, rng: &mut Rng) -> DVector<C64> {
    DVector::from_fn(d, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    })
}

/// `G G^dagger / tr` for a `dim x cols` complex Gaussian `G`.
pub fn wishart_state(dim: usize, cols: usize, rng: &mut Rng) -> DMatrix<C64> {
    let g = DMatrix::from_fn(dim, cols, |_, _| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)));
    let w = &g * g.adjoint();
    let tr = w.trace();
    w / tr
}

pub fn maximally_mixed(n: usize) -> Result<DensityMatrix> {
    DensityMatrix::maximally_mixed(n)
}

pub fn haar_random_pure(n: usize, rng: &mut Rng) -> Result<PureState> {
    PureState::haar_random(n, rng)
}

/// `(I + 3 eps P) / 2^n` together with a flag set when `P` is the identity.
#[derive(Clone, Debug)]
pub struct PerturbedState {
    pub state: DensityMatrix,
    /// `P = I` makes the formula unnormalised; the state is then `I / 2^n`.
    pub identity_warning: bool,
}

pub fn rho_p(p: &PauliString, eps: f64) -> Result<PerturbedState> {
    if !(0.0..=1.0 / 3.0 + 1e-15).contains(&eps) {
        return Err(Error::param(format!("eps {eps} outside [0, 1/3]")));
    }
    let n = p.n();
    if p.is_identity() {
        return Ok(PerturbedState { state: DensityMatrix::maximally_mixed(n)?, identity_warning: true });
    }
    let d = 1usize << n;
    let mut m = p.to_dense()? * C64::new(3.0 * eps, 0.0);
    for i in 0..d {
        m[(i, i)] += C64::new(1.0, 0.0);
    }
    Ok(PerturbedState { state: DensityMatrix { n, m: m / C64::new(d as f64, 0.0) }, identity_warning: false })
}

pub fn expectation(p: &PauliString, rho: &DensityMatrix) -> Result<f64> {
    if p.n() != rho.n {
        return Err(Error::SizeMismatch { left: p.n(), right: rho.n });
    }
    Ok(p.trace_with(&rho.m).re)
}

/// `tr(P rho)` for every `P`, indexed by `PauliIndex`.
pub fn pauli_spectrum(rho: &DensityMatrix) -> Vec<f64> {
    all_paulis(rho.n).map(|p| p.trace_with(&rho.m).re).collect()
}

/// Rebuild `rho = 2^-n sum_P lambda_P P` from its spectrum.
pub fn from_pauli_spectrum(n: usize, spectrum: &[f64]) -> Result<DensityMatrix> {
    check_cap("density matrix", n)?;
    let d = 1usize << n;
    let mut m = DMatrix::zeros(d, d);
    for (p, &l) in all_paulis(n).zip(spectrum) {
        if l == 0.0 {
            continue;
        }
        for c in 0..d {
            m[(c ^ p.x_bits() as usize, c)] += p.column_phase(c as u64) * (l / d as f64);
        }
    }
    DensityMatrix::new(m)
}

#[derive(Clone, Debug)]
pub struct Povm {
    n: usize,
    elements: Vec<DMatrix<C64>>,
    labels: Vec<String>,
}

impl Povm {
    /// Checks every element is PSD and that they sum to the identity.
    pub fn new(elements: Vec<DMatrix<C64>>, labels: Vec<String>) -> Result<Self> {
        let first = elements.first().ok_or(Error::Empty("POVM"))?;
        if labels.len() != elements.len() {
            return Err(Error::InvalidPovm("label count differs from element count".into()));
        }
        let d = first.nrows();
        let n = dim_qubits(d).ok_or_else(|| Error::InvalidPovm("dimension is not a power of two".into()))?;
        let mut sum = DMatrix::<C64>::zeros(d, d);
        for (f, l) in elements.iter().zip(&labels) {
            if f.nrows() != d || f.ncols() != d {
                return Err(Error::InvalidPovm(format!("element {l} has the wrong shape")));
            }
            if !is_hermitian(f, 1e-9) || min_eigenvalue(f) < -PSD_TOL {
                return Err(Error::InvalidPovm(format!("element {l} is not PSD")));
            }
            sum += f;
        }
        let dev = (sum - DMatrix::<C64>::identity(d, d)).iter().map(|v| v.norm()).fold(0.0, f64::max);
        if dev > 1e-9 {
            return Err(Error::InvalidPovm(format!("elements sum to identity only within {dev:e}")));
        }
        Ok(Povm { n, elements, labels })
    }

    pub(crate) fn from_parts_unchecked(n: usize, elements: Vec<DMatrix<C64>>, labels: Vec<String>) -> Self {
        Povm { n, elements, labels }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[DMatrix<C64>] {
        &self.elements
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// Probabilities over outcomes, in POVM element order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    /// Values in `[-1e-9, 0)` are clipped to zero and the rest renormalised.
    pub fn from_raw(raw: Vec<f64>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::Empty("distribution"));
        }
        let mut probs = raw;
        for p in probs.iter_mut() {
            if *p < -PSD_TOL || !p.is_finite() {
                return Err(Error::InvalidDistribution(format!("probability {p}")));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("zero total mass".into()));
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(OutcomeDistribution { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn sampler(&self) -> Sampler {
        Sampler(WeightedIndex::new(&self.probs).expect("validated distribution"))
    }

    pub fn sample(&self, rng: &mut Rng, shots: usize) -> Vec<usize> {
        let s = self.sampler();
        (0..shots).map(|_| s.draw(rng)).collect()
    }
}

/// Reusable draw table for one distribution.
#[derive(Clone, Debug)]
pub struct Sampler(WeightedIndex<f64>);

impl Sampler {
    pub fn draw(&self, rng: &mut Rng) -> usize {
        self.0.sample(rng)
    }
}

pub fn outcome_distribution(povm: &Povm, rho: &DensityMatrix) -> Result<OutcomeDistribution> {
    if povm.n != rho.n {
        return Err(Error::SizeMismatch { left: povm.n, right: rho.n });
    }
    let raw = povm.elements.iter().map(|f| trace_product(f, &rho.m).re).collect();
    OutcomeDistribution::from_raw(raw)
}

/// Outcome indices drawn i.i.d. from `povm` applied to `rho`.
pub fn sample(povm: &Povm, rho: &DensityMatrix, rng: &mut Rng, shots: usize) -> Result<Vec<usize>> {
    Ok(outcome_distribution(povm, rho)?.sample(rng, shots))
}

pub(crate) fn trace_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    let d = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// `{2^-n Q sigma^T Q}` over all `Q`, labelled by `Q`. Applied to `rho`
/// it has the statistics of a Bell measurement on `sigma (x) rho`.
pub fn pauli_conjugated_povm(sigma: &DensityMatrix) -> Result<Povm> {
    let n = sigma.n;
    let st = sigma.m.transpose();
    let scale = C64::new(1.0 / (1u64 << n) as f64, 0.0);
    let mut elements = Vec::with_capacity(1 << (2 * n));
    let mut labels = Vec::with_capacity(1 << (2 * n));
    for q in all_paulis(n) {
        elements.push(q.conjugate(&st) * scale);
        labels.push(q.to_string());
    }
    Ok(Povm::from_parts_unchecked(n, elements, labels))
}

/// Projective Bell measurement on `2n` qubits, outcome `Q` for the state
/// `(I (x) Q)|Psi_I>`.
pub fn bell_povm(n: usize) -> Result<Povm> {
    check_cap("Bell POVM", 2 * n)?;
    let d = 1usize << n;
    let norm = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut elements = Vec::with_capacity(d * d);
    let mut labels = Vec::with_capacity(d * d);
    for q in all_paulis(n) {
        let mut v = DVector::<C64>::zeros(d * d);
        for b in 0..d {
            v[b * d + (b ^ q.x_bits() as usize)] = q.column_phase(b as u64) * norm;
        }
        elements.push(&v * v.adjoint());
        labels.push(q.to_string());
    }
    Ok(Povm::from_parts_unchecked(2 * n, elements, labels))
}

/// Eigenvalue of `P (x) P` on the Bell state `(I (x) Q)|Psi_I>`.
pub fn bell_eigenvalue(p: &PauliString, q: &PauliString) -> Result<i8> {
    let s = p.commutes(q)?;
    Ok(if p.y_count() % 2 == 0 { s } else { -s })
}

/// Bell outcome distribution over `Q` for `sigma (x) rho`, from the two Pauli
/// spectra. Indexed by `PauliIndex`.
pub fn bell_distribution_from_spectra(n: usize, sigma: &[f64], rho: &[f64]) -> Result<OutcomeDistribution> {
    let d2 = 1usize << (2 * n);
    if sigma.len() != d2 || rho.len() != d2 {
        return Err(Error::param("spectrum length does not match qubit count"));
    }
    let f: Vec<f64> = all_paulis(n)
        .zip(sigma.iter().zip(rho))
        .map(|(a, (s, r))| if a.y_count() % 2 == 0 { s * r } else { -s * r })
        .collect();
    let g = symplectic_fourier(&f, n);
    OutcomeDistribution::from_raw(g.into_iter().map(|v| v / d2 as f64).collect())
}

pub fn bell_distribution(sigma: &DensityMatrix, rho: &DensityMatrix) -> Result<OutcomeDistribution> {
    if sigma.n != rho.n {
        return Err(Error::SizeMismatch { left: sigma.n, right: rho.n });
    }
    bell_distribution_from_spectra(rho.n, &pauli_spectrum(sigma), &pauli_spectrum(rho))
}

/// `sum_s q_s (p_s / q_s - 1)^2` for `p` from `rho1` and `q` from `rho0`.
pub fn chi2_divergence(povm: &Povm, rho1: &DensityMatrix, rho0: &DensityMatrix) -> Result<f64> {
    let p = outcome_distribution(povm, rho1)?;
    let q = outcome_distribution(povm, rho0)?;
    Ok(chi2_of(p.probs(), q.probs()))
}

pub(crate) fn chi2_of(p: &[f64], q: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&ps, &qs) in p.iter().zip(q) {
        if qs > 0.0 {
            acc += (ps - qs) * (ps - qs) / qs;
        } else if ps > 0.0 {
            return f64::INFINITY;
        }
    }
    acc
}

/// Probability that the swap test on the last `k` qubits reports the
/// antisymmetric outcome after both copies measured the first `n - k` qubits
/// in the computational basis and agreed.
pub fn purity_event_probability(rho: &DensityMatrix, k: usize) -> Result<f64> {
    let n = rho.n;
    if k > n {
        return Err(Error::param(format!("k = {k} exceeds n = {n}")));
    }
    let block = 1usize << k;
    let mut acc = 0.0;
    for x in 0..1usize << (n - k) {
        let view = rho.m.view((x * block, x * block), (block, block));
        let tr = view.trace().re;
        let tr2: f64 = view.iter().map(|v| v.norm_sqr()).sum();
        acc += (tr * tr - tr2) / 2.0;
    }
    Ok(acc)
}

/// Trace out the listed qubits; the rest keep their order.
pub fn partial_trace(rho: &DensityMatrix, trace_out: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n;
    let mut out_mask = 0usize;
    for &q in trace_out {
        if q >= n {
            return Err(Error::param(format!("qubit {q} out of range for {n} qubits")));
        }
        out_mask |= 1 << (n - 1 - q);
    }
    let keep: Vec<usize> = (0..n).filter(|q| out_mask & (1 << (n - 1 - q)) == 0).collect();
    let gone: Vec<usize> = (0..n).filter(|q| out_mask & (1 << (n - 1 - q)) != 0).collect();
    let spread = |bits: usize, qubits: &[usize]| {
        let m = qubits.len();
        qubits.iter().enumerate().fold(0usize, |acc, (i, &q)| acc | (((bits >> (m - 1 - i)) & 1) << (n - 1 - q)))
    };
    let dk = 1usize << keep.len();
    let mut m = DMatrix::zeros(dk, dk);
    for r in 0..dk {
        let rb = spread(r, &keep);
        for c in 0..dk {
            let cb = spread(c, &keep);
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..1usize << gone.len() {
                let tb = spread(t, &gone);
                acc += rho.m[(rb | tb, cb | tb)];
            }
            m[(r, c)] = acc;
        }
    }
    Ok(DensityMatrix { n: keep.len(), m })
}

/// Named state generators: `mixed`, `haar`, `ghz`, `rho_p:<pauli>:<eps>`,
/// `product:<bitstring>`.
#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    Mixed,
    Haar,
    Ghz,
    RhoP { pauli: PauliString, eps: f64 },
    Product(Vec<bool>),
}

impl StateSpec {
    /// Qubit count fixed by the spec itself, if any.
    pub fn intrinsic_n(&self) -> Option<usize> {
        match self {
            StateSpec::RhoP { pauli, .. } => Some(pauli.n()),
            StateSpec::Product(bits) => Some(bits.len()),
            _ => None,
        }
    }

    pub fn build(&self, n: usize, rng: &mut Rng) -> Result<DensityMatrix> {
        if let Some(m) = self.intrinsic_n() {
            if m != n {
                return Err(Error::SizeMismatch { left: n, right: m });
            }
        }
        match self {
            StateSpec::Mixed => DensityMatrix::maximally_mixed(n),
            StateSpec::Haar => Ok(PureState::haar_random(n, rng)?.to_density()),
            StateSpec::Ghz => Ok(PureState::ghz(n)?.to_density()),
            StateSpec::RhoP { pauli, eps } => Ok(rho_p(pauli, *eps)?.state),
            StateSpec::Product(bits) => Ok(PureState::product(bits)?.to_density()),
        }
    }
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unknown state generator {s:?}"));
        let mut parts = s.trim().split(':');
        match parts.next().ok_or_else(bad)? {
            "mixed" => Ok(StateSpec::Mixed),
            "haar" => Ok(StateSpec::Haar),
            "ghz" => Ok(StateSpec::Ghz),
            "rho_p" => {
                let pauli = parts.next().ok_or_else(bad)?.parse()?;
                let eps = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
                Ok(StateSpec::RhoP { pauli, eps })
            }
            "product" => {
                let bits = parts.next().ok_or_else(bad)?;
                bits.chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(bad()),
                    })
                    .collect::<Result<Vec<_>>>()
                    .map(StateSpec::Product)
            }
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use proptest::prelude::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn haar_rho(n: usize, seed: u64) -> DensityMatrix {
        PureState::haar_random(n, &mut stream(seed, 0)).unwrap().to_density()
    }

    fn mixed_rho(n: usize, seed: u64) -> DensityMatrix {
        DensityMatrix::new(wishart_state(1 << n, 1 << n, &mut stream(seed, 1))).unwrap()
    }

    // |Psi_Q> = (I (x) Q) 2^{-n/2} sum_x |x x>, built directly
    fn bell_vector(q: &PauliString) -> DVector<C64> {
        let n = q.n();
        let d = 1usize << n;
        let mut v = DVector::zeros(d * d);
        let qd = q.to_dense().unwrap();
        for x in 0..d {
            for y in 0..d {
                v[x * d + y] += qd[(y, x)] / (d as f64).sqrt();
            }
        }
        v
    }

    #[test]
    fn rho_p_examples() {
        let s = rho_p(&p("Z"), 0.1).unwrap();
        let m = s.state.matrix();
        assert!((m[(0, 0)].re - 0.65).abs() < 1e-15);
        assert!((m[(1, 1)].re - 0.35).abs() < 1e-15);
        assert!(!s.identity_warning);
        assert!(rho_p(&p("Z"), 0.4).is_err());
        assert!(rho_p(&p("II"), 0.1).unwrap().identity_warning);
        let edge = rho_p(&p("X"), 1.0 / 3.0).unwrap();
        assert!(min_eigenvalue(edge.state.matrix()).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_expectations_vanish() {
        let rho = maximally_mixed(3).unwrap();
        for q in all_paulis(3).skip(1) {
            assert!(expectation(&q, &rho).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn validation_rejects_non_states() {
        let mut m = DMatrix::identity(2, 2) * C64::new(0.5, 0.0);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        let neg = DMatrix::from_row_slice(2, 2, &[C64::new(1.2, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-0.2, 0.0)]);
        assert!(DensityMatrix::new(neg).is_err());
    }

    #[test]
    fn spectrum_round_trip() {
        let rho = haar_rho(3, 4);
        let back = from_pauli_spectrum(3, &pauli_spectrum(&rho)).unwrap();
        assert!((back.matrix() - rho.matrix()).iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn bell_eigenvalue_matches_dense_operator() {
        for n in 1..=2 {
            for pp in all_paulis(n) {
                let pd = pp.to_dense().unwrap();
                let pp2 = pd.kronecker(&pd);
                for q in all_paulis(n) {
                    let v = bell_vector(&q);
                    let w = &pp2 * &v;
                    let mu = bell_eigenvalue(&pp, &q).unwrap() as f64;
                    assert!((w - &v * C64::new(mu, 0.0)).norm() < 1e-12, "{pp} {q}");
                }
            }
        }
    }

    #[test]
    fn conjugated_povm_equals_bell_measurement() {
        let n = 2;
        let sigma = haar_rho(n, 1);
        let rho = mixed_rho(n, 2);
        let joint = sigma.tensor(&rho).unwrap();
        let single = outcome_distribution(&pauli_conjugated_povm(&sigma).unwrap(), &rho).unwrap();
        let fast = bell_distribution(&sigma, &rho).unwrap();
        for (i, q) in all_paulis(n).enumerate() {
            let v = bell_vector(&q);
            let direct = (v.adjoint() * joint.matrix() * &v)[(0, 0)].re;
            assert!((single.probs()[i] - direct).abs() < 1e-12);
            assert!((fast.probs()[i] - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn conjugated_povm_is_valid() {
        let sigma = mixed_rho(2, 9);
        let povm = pauli_conjugated_povm(&sigma).unwrap();
        Povm::new(povm.elements().to_vec(), povm.labels().to_vec()).unwrap();
    }

    #[test]
    fn chi2_identical_states_is_zero() {
        let rho = mixed_rho(2, 3);
        let povm = pauli_conjugated_povm(&haar_rho(2, 5)).unwrap();
        assert!(chi2_divergence(&povm, &rho, &rho).unwrap().abs() < 1e-14);
    }

    #[test]
    fn purity_probability_mixed_and_pure() {
        for n in 1..=4 {
            for k in 0..=n {
                let got = purity_event_probability(&maximally_mixed(n).unwrap(), k).unwrap();
                let want = ((1u64 << k) - 1) as f64 / (1u64 << (n + 1)) as f64;
                assert_eq!(got, want, "n={n} k={k}");
                let pure = purity_event_probability(&haar_rho(n, 7), k).unwrap();
                assert!(pure.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn partial_trace_examples() {
        let rho = haar_rho(3, 11);
        let all = partial_trace(&rho, &[0, 1, 2]).unwrap();
        assert_eq!(all.n(), 0);
        assert!((all.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
        let a = mixed_rho(1, 1);
        let b = mixed_rho(2, 2);
        let ab = a.tensor(&b).unwrap();
        let got = partial_trace(&ab, &[1, 2]).unwrap();
        assert!((got.matrix() - a.matrix()).iter().all(|v| v.norm() < 1e-12));
        let got = partial_trace(&ab, &[0]).unwrap();
        assert!((got.matrix() - b.matrix()).iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn json_round_trip() {
        let rho = mixed_rho(2, 21);
        let back = DensityMatrix::from_json(&rho.to_json().unwrap()).unwrap();
        assert!((back.matrix() - rho.matrix()).iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn state_spec_parsing() {
        assert_eq!("mixed".parse::<StateSpec>().unwrap(), StateSpec::Mixed);
        let s: StateSpec = "rho_p:XZ:0.1".parse().unwrap();
        assert_eq!(s.intrinsic_n(), Some(2));
        let s: StateSpec = "product:101".parse().unwrap();
        let rho = s.build(3, &mut stream(0, 0)).unwrap();
        assert_eq!(rho.matrix()[(5, 5)].re, 1.0);
        assert!("bogus".parse::<StateSpec>().is_err());
        assert!("product:12".parse::<StateSpec>().is_err());
    }

    #[test]
    fn sampling_is_seeded() {
        let rho = haar_rho(2, 3);
        let povm = pauli_conjugated_povm(&rho).unwrap();
        let a = sample(&povm, &rho, &mut stream(5, 0), 50).unwrap();
        let b = sample(&povm, &rho, &mut stream(5, 0), 50).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn clipping_rule() {
        let d = OutcomeDistribution::from_raw(vec![0.5, -5e-10, 0.5]).unwrap();
        assert_eq!(d.probs()[1], 0.0);
        assert!(OutcomeDistribution::from_raw(vec![1.0, -1e-6]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn distributions_are_normalised(seed in 0u64..10_000) {
            let rho = mixed_rho(2, seed);
            let sigma = haar_rho(2, seed + 1);
            let d = bell_distribution(&sigma, &rho).unwrap();
            prop_assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(d.probs().iter().all(|&x| x >= 0.0));
        }

        #[test]
        fn bell_statistics_give_squared_expectations(seed in 0u64..10_000) {
            // E_Q mu(P, Q) = tr(P rho)^2 under the Bell distribution of rho (x) rho
            let n = 2;
            let rho = mixed_rho(n, seed);
            let d = bell_distribution(&rho, &rho).unwrap();
            let qs: Vec<_> = all_paulis(n).collect();
            for pp in all_paulis(n) {
                let mean: f64 = qs.iter().zip(d.probs()).map(|(q, w)| w * bell_eigenvalue(&pp, q).unwrap() as f64).sum();
                let t = expectation(&pp, &rho).unwrap();
                prop_assert!((mean - t * t).abs() < 1e-12);
            }
        }
    }
}
