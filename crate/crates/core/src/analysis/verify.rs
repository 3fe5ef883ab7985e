use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::delta::chi2_master;
use super::mps::random_mps;
use crate::error::{Error, Result};
use crate::pauli::{all_paulis, embed, PauliSet};
use crate::quantum::{gaussian_vector, wishart_state};
use crate::rng::{fork, Rng};
use crate::stabilizer::{clifford_povm, stabilizer_covering};

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// `H^{-1/2}` for a positive definite Hermitian matrix.
fn inverse_sqrt(h: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let eig = h.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|v| *v <= 1e-13) {
        return Err(Error::Verifier("normalising matrix is singular".into()));
    }
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| C64::new(v.powf(-0.5), 0.0)));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.adjoint())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliIdentityCheck {
    pub n: usize,
    /// `max |sum_P P (x) P - 2^n SWAP|`.
    pub swap_error: f64,
    /// `max |sum_P P B P - 2^n tr(B) I|` over the random `B`.
    pub twirl_error: f64,
}

/// Check `sum_P P (x) P = 2^n SWAP` exhaustively and
/// `sum_P P B P = 2^n tr(B) I` on `trials` random complex `B`.
pub fn verify_pauli_identities(n: usize, trials: usize, rng: &mut Rng) -> Result<PauliIdentityCheck> {
    crate::pauli::check_cap("pauli identities", 2 * n)?;
    let d = 1usize << n;
    let mut sum = DMatrix::<C64>::zeros(d * d, d * d);
    for p in all_paulis(n) {
        let x = p.x_bits() as usize;
        for b1 in 0..d {
            for b2 in 0..d {
                sum[(((b1 ^ x) * d) + (b2 ^ x), b1 * d + b2)] +=
                    p.column_phase(b1 as u64) * p.column_phase(b2 as u64);
            }
        }
    }
    let mut swap_error: f64 = 0.0;
    for r in 0..d * d {
        for c in 0..d * d {
            let (a, b) = (c / d, c % d);
            let want = if r == b * d + a { d as f64 } else { 0.0 };
            swap_error = swap_error.max((sum[(r, c)] - C64::new(want, 0.0)).norm());
        }
    }
    let mut twirl_error: f64 = 0.0;
    for _ in 0..trials {
        let v = gaussian_vector(d * d, rng);
        let b = DMatrix::from_column_slice(d, d, v.as_slice());
        let mut acc = DMatrix::<C64>::zeros(d, d);
        for p in all_paulis(n) {
            acc += p.conjugate(&b);
        }
        let want = DMatrix::<C64>::identity(d, d) * (b.trace() * d as f64);
        twirl_error = twirl_error.max((acc - want).map(|v| v.norm()).max());
    }
    let check = PauliIdentityCheck { n, swap_error, twirl_error };
    if swap_error > 1e-12 || twirl_error > 1e-10 {
        return Err(Error::Verifier(format!("Pauli identities violated: {check:?}")));
    }
    Ok(check)
}

/// Largest `4^-n sum_P <psi|P^S|psi>^2` over `trials` random MPS. The bound
/// is `2^-n` for a single site and `2^{k-n}` (at most 1) otherwise.
pub fn verify_mps_pauli_bound(
    n: usize,
    k: usize,
    c: usize,
    subset: &[usize],
    trials: usize,
    rng: &mut Rng,
) -> Result<f64> {
    if subset.is_empty() || subset.iter().any(|&j| j >= c) {
        return Err(Error::param("subset must be a nonempty subset of the sites"));
    }
    let bound = if subset.len() == 1 { 2f64.powi(-(n as i32)) } else { 2f64.powf(k as f64 - n as f64).min(1.0) };
    let embedded: Vec<_> = all_paulis(n).map(|p| embed(&p, subset, c)).collect::<Result<_>>()?;
    let scale = 1.0 / (1u64 << (2 * n)) as f64;
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let mps = random_mps(n, k, c, &mut fork(rng, t as u64))?;
        let psi = mps.amplitudes().as_slice();
        let v: f64 = embedded.iter().map(|p| p.expectation_pure(psi).powi(2)).sum::<f64>() * scale;
        if v > bound + 1e-9 {
            return Err(Error::Verifier(format!(
                "MPS bound violated: n={n} k={k} c={c} S={subset:?} trial {t}: {v} > {bound}"
            )));
        }
        worst = worst.max(v);
    }
    Ok(worst)
}

/// Sum of all `T!` permutation operators on `T` qudits of dimension `d`,
/// stored as basis maps. `T <= 4`.
pub struct PermutationSum {
    d: usize,
    t: usize,
    maps: Vec<Vec<usize>>,
}

fn permutations(t: usize) -> Vec<Vec<usize>> {
    if t == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(t - 1) {
        for pos in 0..t {
            let mut q = p.clone();
            q.insert(pos, t - 1);
            out.push(q);
        }
    }
    out
}

impl PermutationSum {
    pub fn new(d: usize, t: usize) -> Result<Self> {
        if !(1..=4).contains(&t) || d < 2 {
            return Err(Error::param(format!("permutation sum needs 1 <= T <= 4 and d >= 2 (T={t}, d={d})")));
        }
        let dim = d.pow(t as u32);
        let maps = permutations(t)
            .into_iter()
            .map(|perm| {
                (0..dim)
                    .map(|i| {
                        // digit j of i moves to slot perm[j]; slot 0 most significant
                        let digits: Vec<usize> = (0..t).map(|j| (i / d.pow((t - 1 - j) as u32)) % d).collect();
                        let mut out = vec![0; t];
                        for (j, &dj) in digits.iter().enumerate() {
                            out[perm[j]] = dj;
                        }
                        out.iter().fold(0, |acc, &v| acc * d + v)
                    })
                    .collect()
            })
            .collect();
        Ok(PermutationSum { d, t, maps })
    }

    pub fn dim(&self) -> usize {
        self.d.pow(self.t as u32)
    }

    /// `tr(rho S_T)`.
    pub fn trace_with(&self, rho: &DMatrix<C64>) -> f64 {
        let mut acc = zero();
        for map in &self.maps {
            for (i, &j) in map.iter().enumerate() {
                acc += rho[(i, j)];
            }
        }
        acc.re
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let dim = self.dim();
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        for map in &self.maps {
            for (i, &j) in map.iter().enumerate() {
                m[(j, i)] += C64::new(1.0, 0.0);
            }
        }
        m
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PermutationCheck {
    pub min_slack: f64,
    pub trials: usize,
}

fn random_mixed(dim: usize, cols: usize, rng: &mut Rng) -> DMatrix<C64> {
    let w = wishart_state(dim, cols, rng);
    let tr = w.trace();
    w / tr
}

/// Check `tr(rho_x (x) rho_y S_{x+y}) >= tr(rho_x S_x) tr(rho_y S_y)` on
/// random states, every third trial using pure states, and
/// `tr(S_T) = d (d+1) ... (d+T-1)` for the three operators.
pub fn verify_permutation_inequality(
    x: usize,
    y: usize,
    d: usize,
    trials: usize,
    rng: &mut Rng,
) -> Result<PermutationCheck> {
    if x == 0 || y == 0 {
        return Err(Error::param("x and y must be positive"));
    }
    if d.pow((x + y) as u32) > 4096 {
        return Err(Error::param("d^(x+y) exceeds 4096"));
    }
    let sx = PermutationSum::new(d, x)?;
    let sy = PermutationSum::new(d, y)?;
    let sxy = PermutationSum::new(d, x + y)?;
    for s in [&sx, &sy, &sxy] {
        let dim = s.dim();
        let tr = s.trace_with(&DMatrix::identity(dim, dim));
        let want: f64 = (0..s.t).map(|i| (d + i) as f64).product();
        if (tr - want).abs() > 1e-9 {
            return Err(Error::Verifier(format!("tr(S_{}) = {tr}, expected {want}", s.t)));
        }
    }
    let (dx, dy) = (sx.dim(), sy.dim());
    let mut min_slack = f64::INFINITY;
    for t in 0..trials {
        let mut sub = fork(rng, t as u64);
        let (cx, cy) = if t % 3 == 0 { (1, 1) } else { ((d * d).max(dx), (d * d).max(dy)) };
        let rx = random_mixed(dx, cx, &mut sub);
        let ry = random_mixed(dy, cy, &mut sub);
        let joint = rx.kronecker(&ry);
        let slack = sxy.trace_with(&joint) - sx.trace_with(&rx) * sy.trace_with(&ry);
        if slack < -1e-9 {
            return Err(Error::Verifier(format!("permutation inequality violated at trial {t}: slack {slack}")));
        }
        min_slack = min_slack.min(slack);
    }
    Ok(PermutationCheck { min_slack, trials })
}

/// Random POVM on `k` memory qubits plus a fresh `n`-qubit copy, after a
/// first copy was compressed into memory: elements `|L_s><L_s|` with
/// `L = (N_{s1}^dag (x) I) phi_{s1,s2}`, returned as the vectors `L`.
pub fn random_memory_povm(n: usize, k: usize, rng: &mut Rng) -> Result<Vec<DVector<C64>>> {
    if k > n {
        return Err(Error::param(format!("k = {k} exceeds n = {n}")));
    }
    let (d, m) = (1usize << n, 1usize << k);
    // first step: Kraus maps n -> k qubits with sum N^dag N = I
    let first = d.div_ceil(m) + (fork(rng, 0).random_range(0..3usize));
    let raw: Vec<DMatrix<C64>> =
        (0..first).map(|_| DMatrix::from_column_slice(m, d, gaussian_vector(m * d, rng).as_slice())).collect();
    let g = raw.iter().fold(DMatrix::<C64>::zeros(d, d), |acc, a| acc + a.adjoint() * a);
    let g_half = inverse_sqrt(&g)?;
    let mut out = Vec::new();
    for a in &raw {
        let kraus = a * &g_half;
        // second step: rank-one POVM on memory (x) second copy
        let dim = m * d;
        let count = dim + rng.random_range(0..dim);
        let vecs: Vec<DVector<C64>> = (0..count).map(|_| gaussian_vector(dim, rng)).collect();
        let h = vecs.iter().fold(DMatrix::<C64>::zeros(dim, dim), |acc, v| acc + v * v.adjoint());
        let h_half = inverse_sqrt(&h)?;
        let lift = kraus.adjoint().kronecker(&DMatrix::<C64>::identity(d, d));
        for v in vecs {
            out.push(&lift * (&h_half * v));
        }
    }
    Ok(out)
}

use rand::Rng as _;

/// `sum_s tr(F_s SWAP)^2 / tr(F_s)` for rank-one elements `|L><L|` on two
/// `n`-qubit copies.
pub fn swap_statistic(n: usize, elements: &[DVector<C64>]) -> f64 {
    let d = 1usize << n;
    elements
        .iter()
        .map(|l| {
            let tr = l.norm_squared();
            if tr <= 0.0 {
                return 0.0;
            }
            let mut sw = zero();
            for a in 0..d {
                for b in 0..d {
                    sw += l[a * d + b].conj() * l[b * d + a];
                }
            }
            sw.re * sw.re / tr
        })
        .sum()
}

/// Largest swap statistic over `trials` random memory-`k` POVMs; the bound
/// is `2^{k+n}`.
pub fn verify_swap_bound(n: usize, k: usize, trials: usize, rng: &mut Rng) -> Result<f64> {
    crate::pauli::check_cap("swap bound", 2 * n)?;
    let bound = (1u64 << (k + n)) as f64;
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let povm = random_memory_povm(n, k, &mut fork(rng, t as u64))?;
        let v = swap_statistic(n, &povm);
        if v > bound + 1e-6 {
            return Err(Error::Verifier(format!("SWAP bound violated: n={n} k={k} trial {t}: {v} > {bound}")));
        }
        worst = worst.max(v);
    }
    Ok(worst)
}

/// Largest `|chi^2 - 9 eps^2 [P in F]|` over every family of the `n`-qubit
/// covering and every nontrivial `P`.
pub fn verify_chi2_clifford(n: usize, eps: f64) -> Result<f64> {
    let covering = stabilizer_covering(n)?;
    let mut worst: f64 = 0.0;
    for g in covering.groups() {
        let povm = clifford_povm(g)?;
        for p in all_paulis(n).filter(|p| !p.is_identity()) {
            let set = PauliSet::new(vec![p])?;
            let v = chi2_master(&set, &[1.0], &povm, 1, eps)?;
            let want = if g.contains(&p) { 9.0 * eps * eps } else { 0.0 };
            worst = worst.max((v - want).abs());
        }
    }
    if worst > 1e-10 {
        return Err(Error::Verifier(format!("Clifford chi^2 off by {worst}")));
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifySuite {
    PauliIdentities,
    MpsBound,
    Permutation,
    SwapBound,
    Chi2Clifford,
}

impl std::str::FromStr for VerifySuite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "pauli-identities" => VerifySuite::PauliIdentities,
            "mps-bound" => VerifySuite::MpsBound,
            "permutation" => VerifySuite::Permutation,
            "swap-bound" => VerifySuite::SwapBound,
            "chi2-clifford" => VerifySuite::Chi2Clifford,
            other => return Err(Error::Config(format!("unknown verify suite {other:?}"))),
        })
    }
}

/// One line of a suite run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteCase {
    pub case: String,
    pub statistic: f64,
    pub bound: f64,
}

/// Run a suite over its standard parameter grid. Any violation is an
/// `Error::Verifier`.
pub fn run_suite(suite: VerifySuite, trials: usize, rng: &mut Rng) -> Result<Vec<SuiteCase>> {
    let mut out = Vec::new();
    match suite {
        VerifySuite::PauliIdentities => {
            for n in 1..=3 {
                let c = verify_pauli_identities(n, trials.min(20).max(1), &mut fork(rng, n as u64))?;
                out.push(SuiteCase { case: format!("sum P(x)P, n={n}"), statistic: c.swap_error, bound: 1e-12 });
                out.push(SuiteCase { case: format!("sum PBP, n={n}"), statistic: c.twirl_error, bound: 1e-10 });
            }
        }
        VerifySuite::MpsBound => {
            for k in 0..=2 {
                let v = verify_mps_pauli_bound(2, k, 2, &[0, 1], trials, &mut fork(rng, k as u64))?;
                out.push(SuiteCase { case: format!("n=2 k={k} c=2 S={{1,2}}"), statistic: v, bound: 2f64.powi(k as i32 - 2) });
            }
            let v = verify_mps_pauli_bound(2, 1, 2, &[0], trials, &mut fork(rng, 9))?;
            out.push(SuiteCase { case: "n=2 k=1 c=2 S={1}".into(), statistic: v, bound: 0.25 });
        }
        VerifySuite::Permutation => {
            for (x, y) in [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (3, 1)] {
                let c = verify_permutation_inequality(x, y, 2, trials, &mut fork(rng, (10 * x + y) as u64))?;
                out.push(SuiteCase { case: format!("d=2 x={x} y={y} (min slack)"), statistic: c.min_slack, bound: -1e-9 });
            }
        }
        VerifySuite::SwapBound => {
            for k in 0..=2 {
                let v = verify_swap_bound(2, k, trials, &mut fork(rng, k as u64))?;
                out.push(SuiteCase { case: format!("n=2 k={k}"), statistic: v, bound: (1u64 << (k + 2)) as f64 });
            }
        }
        VerifySuite::Chi2Clifford => {
            for n in 1..=3 {
                let v = verify_chi2_clifford(n, 0.2)?;
                out.push(SuiteCase { case: format!("n={n} eps=0.2 (max abs error)"), statistic: v, bound: 1e-10 });
            }
        }
    }
    Ok(out)
}
