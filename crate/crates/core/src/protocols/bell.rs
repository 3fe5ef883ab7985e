use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{budget, check_set, targets, Clock, ProtocolReport};
use crate::error::{Error, Result};
use crate::pauli::{all_paulis, check_cap, symplectic_fourier, walsh_hadamard, PauliSet};
use crate::quantum::{bell_distribution, expectation, gaussian_vector, pauli_spectrum, DensityMatrix, OutcomeDistribution};
use crate::rng::{fork, Rng};
use crate::stabilizer::{stabilizer_covering, StabilizerGroup};

/// Outcome counts indexed by `PauliIndex`.
fn histogram(dist: &OutcomeDistribution, rounds: u64, rng: &mut Rng) -> Vec<u64> {
    let sampler = dist.sampler();
    let mut counts = vec![0u64; dist.len()];
    for _ in 0..rounds {
        counts[sampler.draw(rng)] += 1;
    }
    counts
}

/// `(-1)^{#Y(a)}` for every index `a`, the Bell sign of the identity outcome.
fn y_parity(n: usize) -> Vec<f64> {
    all_paulis(n).map(|a| if a.y_count() % 2 == 0 { 1.0 } else { -1.0 }).collect()
}

/// `sum_Q counts[Q] mu(P, Q) / T` for every `P` at once.
fn bell_means(n: usize, counts: &[u64], rounds: u64) -> Vec<f64> {
    let raw: Vec<f64> = counts.iter().map(|&c| c as f64 / rounds as f64).collect();
    let g = symplectic_fourier(&raw, n);
    g.iter().zip(y_parity(n)).map(|(v, s)| v * s).collect()
}

/// Two-copy Bell sampling of `rho (x) rho`. Each string gets the root of its
/// mean Bell eigenvalue, clipped to `[0, 1]` first. Targets are `|tr(P rho)|`.
pub fn bell_abs_protocol(set: &PauliSet, rho: &DensityMatrix, rounds: u64, rng: &mut Rng) -> Result<ProtocolReport> {
    check_set(set, rho)?;
    if rounds == 0 {
        return Err(Error::param("rounds must be positive"));
    }
    let clock = Clock::start();
    let n = rho.n();
    let counts = histogram(&bell_distribution(rho, rho)?, rounds, rng);
    let means = bell_means(n, &counts, rounds);
    let mut report = ProtocolReport::new("bell", n);
    for (p, t) in set.iter().zip(targets(set, rho)?) {
        let sq = means[p.index().value() as usize].clamp(0.0, 1.0);
        let abs = sq.sqrt();
        report.push(*p, abs, t.abs());
        report.estimates.last_mut().unwrap().abs_estimate = Some(abs);
    }
    report.add_stage("bell pairs", rounds, 2);
    clock.stop(&mut report);
    Ok(report)
}

/// How the reference state for sign recovery is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaMode {
    /// Use the true state.
    Oracle,
    /// Fit a rank-`rank` state to the absolute estimates.
    Search { rank: usize },
}

const SEARCH_RESTARTS: usize = 20;
const SEARCH_STEPS: usize = 400;

/// Given `f_P ~ |tr(P rho)|` to within `eps`, recover signs. A state `sigma`
/// matching `f` is Bell-measured against `rho` (one copy of `rho` per round,
/// since `sigma` is known classically); `g_P ~ tr(P sigma) tr(P rho)`, and the
/// output is `g_P / tr(P sigma)`, or exactly 0 when `f_P < 2 eps`.
pub fn sign_recovery(
    set: &PauliSet,
    f: &[f64],
    rho: &DensityMatrix,
    eps: f64,
    rounds: Option<u64>,
    mode: SigmaMode,
    rng: &mut Rng,
) -> Result<ProtocolReport> {
    check_set(set, rho)?;
    if f.len() != set.len() {
        return Err(Error::param("one absolute estimate per string required"));
    }
    if !(eps > 0.0) {
        return Err(Error::param("eps must be positive"));
    }
    let clock = Clock::start();
    let sigma = match mode {
        SigmaMode::Oracle => rho.clone(),
        SigmaMode::Search { rank } => search_sigma(set, f, eps, rank, rng)?,
    };
    let rounds = rounds.unwrap_or_else(|| budget::sign(eps, set.len()));
    let n = rho.n();
    let counts = histogram(&bell_distribution(&sigma, rho)?, rounds, rng);
    let g = bell_means(n, &counts, rounds);
    let mut report = ProtocolReport::new("sign", n);
    for ((p, t), &fp) in set.iter().zip(targets(set, rho)?).zip(f) {
        let est = if fp < 2.0 * eps {
            0.0
        } else {
            let ts = expectation(p, &sigma)?;
            g[p.index().value() as usize] / ts
        };
        report.push(*p, est, t);
        report.estimates.last_mut().unwrap().abs_estimate = Some(fp);
    }
    report.add_stage("sigma-rho bell", rounds, 1);
    clock.stop(&mut report);
    Ok(report)
}

/// Gradient descent on `sigma = A A^dag / tr(A A^dag)` minimising
/// `sum_P (|tr(P sigma)| - f_P)^2`; certified by the max deviation.
fn search_sigma(set: &PauliSet, f: &[f64], eps: f64, rank: usize, rng: &mut Rng) -> Result<DensityMatrix> {
    let n = set.n();
    check_cap("sigma search", n)?;
    let d = 1usize << n;
    let rank = rank.clamp(1, d);
    let paulis: Vec<DMatrix<C64>> = set.iter().map(|p| p.to_dense()).collect::<Result<_>>()?;
    let eval = |a: &DMatrix<C64>| -> (f64, f64, Vec<f64>) {
        let norm = a.norm_squared();
        let rho_un = a * a.adjoint();
        let ts: Vec<f64> = paulis
            .iter()
            .map(|p| crate::quantum::trace_product(p, &rho_un).re / norm)
            .collect();
        let loss = ts.iter().zip(f).map(|(t, fp)| (t.abs() - fp).powi(2)).sum();
        let dev = ts.iter().zip(f).map(|(t, fp)| (t.abs() - fp).abs()).fold(0.0, f64::max);
        (loss, dev, ts)
    };
    let mut best: Option<(f64, DMatrix<C64>)> = None;
    for restart in 0..SEARCH_RESTARTS {
        let mut sub = fork(rng, restart as u64);
        let cols: Vec<_> = (0..rank).map(|_| gaussian_vector(d, &mut sub)).collect();
        let mut a = DMatrix::from_columns(&cols);
        a /= C64::new(a.norm(), 0.0);
        let (mut loss, mut dev, mut ts) = eval(&a);
        let mut lr = 0.5;
        for _ in 0..SEARCH_STEPS {
            if dev <= eps / 4.0 {
                break;
            }
            // d loss / d conj(A) = sum_P 2 (|t| - f) sign(t) (P A - t A)
            let mut grad = DMatrix::<C64>::zeros(d, rank);
            for ((p, t), fp) in paulis.iter().zip(&ts).zip(f) {
                let w = 2.0 * (t.abs() - fp) * t.signum();
                if w != 0.0 {
                    grad += (p * &a - &a * C64::new(*t, 0.0)) * C64::new(w, 0.0);
                }
            }
            loop {
                let mut trial = &a - &grad * C64::new(lr, 0.0);
                trial /= C64::new(trial.norm(), 0.0);
                let (l2, d2, t2) = eval(&trial);
                if l2 < loss {
                    a = trial;
                    (loss, dev, ts) = (l2, d2, t2);
                    lr *= 1.5;
                    break;
                }
                lr *= 0.5;
                if lr < 1e-10 {
                    break;
                }
            }
            if lr < 1e-10 {
                break;
            }
        }
        if best.as_ref().is_none_or(|(b, _)| dev < *b) {
            best = Some((dev, a));
        }
    }
    let (dev, a) = best.expect("at least one restart");
    if dev > eps {
        return Err(Error::SearchFailed(dev));
    }
    let m = &a * a.adjoint();
    let tr = m.trace();
    DensityMatrix::new(m / tr)
}

/// Bell sampling at `eps / 3` followed by sign recovery at `eps / 3`.
/// `rounds`, when given, replaces both stage budgets.
pub fn two_copy_full(
    set: &PauliSet,
    rho: &DensityMatrix,
    eps: f64,
    mode: SigmaMode,
    rounds: Option<u64>,
    rng: &mut Rng,
) -> Result<ProtocolReport> {
    let clock = Clock::start();
    let third = eps / 3.0;
    let bell_rounds = rounds.unwrap_or_else(|| budget::bell(third, set.len()));
    let abs = bell_abs_protocol(set, rho, bell_rounds, &mut fork(rng, 0))?;
    let f: Vec<f64> = abs.estimates.iter().map(|e| e.estimate).collect();
    let mut report = sign_recovery(set, &f, rho, third, rounds, mode, &mut fork(rng, 1))?;
    report.protocol = "twocopy".into();
    report.copies = 0;
    let sign_stages = std::mem::take(&mut report.stages);
    for s in abs.stages.iter().chain(&sign_stages) {
        report.add_stage(&s.name, s.rounds, s.copies_per_round);
    }
    clock.stop(&mut report);
    Ok(report)
}

/// Exact outcome law of one k-memory round for covering group `group` on the
/// last `n - k` qubits. Index layout: `Q * 4^m + e * 2^m + e'`, with `Q` the
/// Bell outcome on the first `k` qubits of both copies and `e`, `e'` the
/// syndromes of the two stabilizer measurements.
pub fn k_memory_distribution(rho: &DensityMatrix, k: usize, group: &StabilizerGroup) -> Result<OutcomeDistribution> {
    let n = rho.n();
    if k > n {
        return Err(Error::param(format!("k = {k} exceeds n = {n}")));
    }
    let m = n - k;
    if group.n() != m || group.rank() != m {
        return Err(Error::NotMaximal { rank: group.rank(), n: m });
    }
    let lam = pauli_spectrum(rho);
    let h = group_walsh(&lam, k, group);
    let (dk, dm) = (1usize << (2 * k), 1usize << m);
    let ypar = y_parity(k);
    let scale = 1.0 / (1u64 << (2 * n)) as f64;
    let mut p = vec![0.0; dk * dm * dm];
    let mut col = vec![0.0; dk];
    for e in 0..dm {
        for e2 in 0..dm {
            for (u, c) in col.iter_mut().enumerate() {
                *c = ypar[u] * h[u * dm + e] * h[u * dm + e2];
            }
            for (q, v) in symplectic_fourier(&col, k).into_iter().enumerate() {
                p[q * dm * dm + e * dm + e2] = v * scale;
            }
        }
    }
    OutcomeDistribution::from_raw(p)
}

/// `h_u(e) = sum_c sign(c) lam_{u (x) s_c} (-1)^{c . e}`, stored `u * 2^m + e`.
fn group_walsh(lam: &[f64], k: usize, group: &StabilizerGroup) -> Vec<f64> {
    let m = group.n();
    let dm = 1usize << m;
    let signed: Vec<(i8, usize)> =
        (0..dm as u64).map(|c| group.signed_element(c)).map(|(s, p)| (s, p.index().value() as usize)).collect();
    let mut out = Vec::with_capacity((1 << (2 * k)) * dm);
    for u in 0..1usize << (2 * k) {
        let v: Vec<f64> = signed.iter().map(|&(s, idx)| s as f64 * lam[(u << (2 * m)) | idx]).collect();
        out.extend(walsh_hadamard(&v));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KMemoryOptions {
    /// Rounds per covering group; defaults to [`budget::k_memory`] at `eps / 3`.
    pub rounds_per_group: Option<u64>,
    /// Sign stage; `None` stops after the absolute values.
    pub sign: Option<SigmaMode>,
    pub sign_rounds: Option<u64>,
}

impl Default for KMemoryOptions {
    fn default() -> Self {
        KMemoryOptions { rounds_per_group: None, sign: Some(SigmaMode::Oracle), sign_rounds: None }
    }
}

/// All nontrivial strings with `k` qubits of memory: the first `k` qubits of
/// two copies are Bell-measured together, the rest of each copy is measured
/// in the eigenbasis of one group of a stabilizer covering. Every string is
/// `u (x) s` with `s` in some group; its squared value is the mean of
/// `mu(u, Q) (-1)^{c.e + c.e'}`. Strings with `s = I` average over groups.
pub fn k_memory_protocol(
    rho: &DensityMatrix,
    k: usize,
    eps: f64,
    options: &KMemoryOptions,
    rng: &mut Rng,
) -> Result<ProtocolReport> {
    let n = rho.n();
    if k > n {
        return Err(Error::param(format!("k = {k} exceeds n = {n}")));
    }
    if !(eps > 0.0) {
        return Err(Error::param("eps must be positive"));
    }
    let clock = Clock::start();
    let m = n - k;
    let covering = stabilizer_covering(m)?;
    let rounds = options.rounds_per_group.unwrap_or_else(|| budget::k_memory(eps / 3.0, n, k));
    let (dk, dm) = (1usize << (2 * k), 1usize << m);
    let ypar = y_parity(k);
    let mut sq = vec![0.0; 1 << (2 * n)];
    let mut hits = vec![0u32; 1 << (2 * n)];
    for (gi, group) in covering.groups().iter().enumerate() {
        let dist = k_memory_distribution(rho, k, group)?;
        let counts = histogram(&dist, rounds, &mut fork(rng, gi as u64));
        // fold (e, e') onto d = e ^ e', then Walsh over d gives the c-sums
        let mut by_q = vec![vec![0.0; dm]; dk];
        for (idx, &cnt) in counts.iter().enumerate() {
            let (q, e, e2) = (idx / (dm * dm), (idx / dm) % dm, idx % dm);
            by_q[q][e ^ e2] += cnt as f64 / rounds as f64;
        }
        let walsh: Vec<Vec<f64>> = by_q.iter().map(|v| walsh_hadamard(v)).collect();
        for c in 0..dm {
            let col: Vec<f64> = walsh.iter().map(|w| w[c]).collect();
            let s_idx = group.signed_element(c as u64).1.index().value() as usize;
            for (u, v) in symplectic_fourier(&col, k).into_iter().enumerate() {
                let idx = (u << (2 * m)) | s_idx;
                sq[idx] += ypar[u] * v;
                hits[idx] += 1;
            }
        }
    }
    let set = PauliSet::nontrivial(n);
    let f: Vec<f64> = set
        .iter()
        .map(|p| {
            let i = p.index().value() as usize;
            (sq[i] / hits[i] as f64).clamp(0.0, 1.0).sqrt()
        })
        .collect();
    let groups = covering.len() as u64;
    let mut report = match options.sign {
        Some(mode) => {
            let mut r = sign_recovery(&set, &f, rho, eps / 3.0, options.sign_rounds, mode, &mut fork(rng, groups))?;
            r.copies = 0;
            let stages = std::mem::take(&mut r.stages);
            r.add_stage("k-memory groups", rounds * groups, 2);
            for s in stages {
                r.add_stage(&s.name, s.rounds, s.copies_per_round);
            }
            r
        }
        None => {
            let mut r = ProtocolReport::new("kmem", n);
            for (p, (fp, t)) in set.iter().zip(f.iter().zip(targets(&set, rho)?)) {
                r.push(*p, *fp, t.abs());
                r.estimates.last_mut().unwrap().abs_estimate = Some(*fp);
            }
            r.add_stage("k-memory groups", rounds * groups, 2);
            r
        }
    };
    report.protocol = "kmem".into();
    clock.stop(&mut report);
    Ok(report)
}
