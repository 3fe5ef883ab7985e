use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::coloring::lp::matrix_game;
use crate::error::{Error, Result};
use crate::pauli::{check_cap, embed, PauliSet, PauliString};
use crate::protocols::StateEnsemble;
use crate::quantum::{haar_random_pure, Povm, PureState};
use crate::rng::{fork, Rng};

/// Largest set accepted by [`delta_a_bracket`].
pub const MAX_BRACKET_SET: usize = 4096;

fn check_pi(set: &PauliSet, pi: &[f64]) -> Result<()> {
    if pi.len() != set.len() {
        return Err(Error::param("distribution length differs from set size"));
    }
    let total: f64 = pi.iter().sum();
    if pi.iter().any(|p| *p < -1e-12) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
    }
    Ok(())
}

fn expectations(set: &PauliSet, psi: &[C64]) -> Vec<f64> {
    set.iter().map(|p| p.expectation_pure(psi)).collect()
}

/// `sum_P pi_P <psi|P|psi>^2`.
pub fn delta_game_value(set: &PauliSet, pi: &[f64], psi: &PureState) -> Result<f64> {
    check_pi(set, pi)?;
    if psi.n() != set.n() {
        return Err(Error::SizeMismatch { left: psi.n(), right: set.n() });
    }
    let amps = psi.amplitudes().as_slice();
    Ok(expectations(set, amps).iter().zip(pi).map(|(e, w)| w * e * e).sum())
}

/// Wirtinger gradient `2 sum_P pi_P <psi|P|psi> P psi` of the game value,
/// taken without renormalising `psi`; its directional derivative along `v`
/// is `2 Re <v, grad>`.
pub fn delta_game_gradient(set: &PauliSet, pi: &[f64], psi: &DVector<C64>) -> DVector<C64> {
    let amps = psi.as_slice();
    let mut grad = DVector::<C64>::zeros(psi.len());
    let mut buf = vec![C64::new(0.0, 0.0); psi.len()];
    for (p, w) in set.iter().zip(pi) {
        if *w == 0.0 {
            continue;
        }
        p.apply(amps, &mut buf);
        let e: C64 = amps.iter().zip(&buf).map(|(a, b)| a.conj() * b).sum();
        let scale = C64::new(2.0 * w * e.re, 0.0);
        for (g, b) in grad.iter_mut().zip(&buf) {
            *g += scale * b;
        }
    }
    grad
}

const ASCENT_STEPS: usize = 300;
const POLISH_STEPS: usize = 50;

fn ascend(set: &PauliSet, pi: &[f64], start: DVector<C64>) -> (f64, DVector<C64>) {
    let value = |v: &DVector<C64>| -> f64 {
        expectations(set, v.as_slice()).iter().zip(pi).map(|(e, w)| w * e * e).sum()
    };
    let mut psi = start.normalize();
    let mut f = value(&psi);
    let mut step = 1.0;
    for _ in 0..ASCENT_STEPS {
        let g = delta_game_gradient(set, pi, &psi);
        // project onto the tangent space of the sphere
        let overlap = psi.dotc(&g);
        let tangent = &g - &psi * overlap;
        if tangent.norm() < 1e-12 {
            break;
        }
        let mut moved = false;
        while step > 1e-12 {
            let trial = (&psi + &tangent * C64::new(step, 0.0)).normalize();
            let ft = value(&trial);
            if ft > f {
                psi = trial;
                f = ft;
                step *= 2.0;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    polish(set, pi, f, psi)
}

/// The game value is convex in `|psi><psi|`, so the top eigenvector of its
/// linearisation `sum_P pi_P <P> P` never does worse. Iterate to a fixed point.
fn polish(set: &PauliSet, pi: &[f64], mut f: f64, mut psi: DVector<C64>) -> (f64, DVector<C64>) {
    let d = psi.len();
    for _ in 0..POLISH_STEPS {
        let e = expectations(set, psi.as_slice());
        let mut g = DMatrix::<C64>::zeros(d, d);
        for ((p, w), ev) in set.iter().zip(pi).zip(&e) {
            let x = p.x_bits() as usize;
            for b in 0..d {
                g[(b ^ x, b)] += p.column_phase(b as u64) * (w * ev);
            }
        }
        let eig = g.symmetric_eigen();
        let top = eig.eigenvalues.imax();
        let cand = eig.eigenvectors.column(top).into_owned();
        let fc: f64 = expectations(set, cand.as_slice()).iter().zip(pi).map(|(e, w)| w * e * e).sum();
        if fc <= f + 1e-15 {
            break;
        }
        f = fc;
        psi = cand;
    }
    (f, psi)
}

/// Best of `restarts` Riemannian ascents from Haar-random starts. The value
/// returned is attained by the returned state, so it bounds the maximum from
/// below.
pub fn best_response_state(set: &PauliSet, pi: &[f64], restarts: usize, rng: &mut Rng) -> Result<(PureState, f64)> {
    check_pi(set, pi)?;
    if restarts == 0 {
        return Err(Error::param("restarts must be at least 1"));
    }
    let n = set.n();
    let mut best: Option<(f64, DVector<C64>)> = None;
    for r in 0..restarts {
        let start = haar_random_pure(n, &mut fork(rng, r as u64))?.amplitudes().clone();
        let (f, psi) = ascend(set, pi, start);
        if best.as_ref().is_none_or(|(b, _)| f > *b) {
            best = Some((f, psi));
        }
    }
    let (f, psi) = best.expect("restarts >= 1");
    Ok((PureState::new(psi)?, f))
}

/// `lambda_max` of `sum_P pi_P P (x) P` on the symmetric subspace. Every
/// `psi (x) psi` lies there, so this bounds `max_psi` of the game value from
/// above.
pub fn symmetric_relaxation(set: &PauliSet, pi: &[f64]) -> Result<f64> {
    check_pi(set, pi)?;
    let n = set.n();
    check_cap("symmetric relaxation", 2 * n)?;
    let d = 1usize << n;
    let mut m = DMatrix::<C64>::zeros(d * d, d * d);
    for (p, w) in set.iter().zip(pi) {
        if *w == 0.0 {
            continue;
        }
        // (P (x) P)[(b1^x, b2^x), (b1, b2)] = phase(b1) phase(b2)
        let x = p.x_bits() as usize;
        for b1 in 0..d {
            let c1 = p.column_phase(b1 as u64) * *w;
            for b2 in 0..d {
                m[(((b1 ^ x) * d) + (b2 ^ x), b1 * d + b2)] += c1 * p.column_phase(b2 as u64);
            }
        }
    }
    // restrict with (I + SWAP) / 2
    let mut sym = DMatrix::<C64>::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            sym[(a * d + b, a * d + b)] += C64::new(0.5, 0.0);
            sym[(a * d + b, b * d + a)] += C64::new(0.5, 0.0);
        }
    }
    let r = &sym * m * &sym;
    Ok(r.symmetric_eigenvalues().iter().cloned().fold(0.0, f64::max))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeltaBracket {
    /// `min_P E_l <psi_l|P|psi_l>^2` for the witness ensemble.
    pub lower: f64,
    /// Smallest best-response value over the distributions tried.
    pub upper: f64,
    /// The symmetric-subspace relaxation at `pi`, when small enough to build.
    pub upper_relaxation: Option<f64>,
    pub pi: Vec<f64>,
    #[serde(skip)]
    pub witness: Option<StateEnsemble>,
    pub witness_count: usize,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BracketOptions {
    pub iterations: usize,
    pub restarts: usize,
    /// Double-oracle rounds after multiplicative weights.
    pub refinements: usize,
}

impl Default for BracketOptions {
    fn default() -> Self {
        BracketOptions { iterations: 500, restarts: 8, refinements: 40 }
    }
}

struct Witnesses {
    states: Vec<PureState>,
    /// `<psi|P|psi>^2` per state and string.
    rows: Vec<Vec<f64>>,
}

impl Witnesses {
    fn push(&mut self, set: &PauliSet, psi: PureState) {
        let row: Vec<f64> = expectations(set, psi.amplitudes().as_slice()).iter().map(|e| e * e).collect();
        if self.rows.iter().any(|r| r.iter().zip(&row).all(|(a, b)| (a - b).abs() < 1e-10)) {
            return;
        }
        self.states.push(psi);
        self.rows.push(row);
    }

    fn best_value(&self, pi: &[f64]) -> f64 {
        self.rows.iter().map(|r| r.iter().zip(pi).map(|(a, w)| a * w).sum::<f64>()).fold(0.0, f64::max)
    }
}

struct Incumbent {
    upper: f64,
    pi: Vec<f64>,
}

impl Incumbent {
    /// Best-respond to `pi`, grow the pool, and keep the smallest upper value.
    fn consider(
        &mut self,
        set: &PauliSet,
        options: &BracketOptions,
        pi: &[f64],
        pool: &mut Witnesses,
        rng: &mut Rng,
        tag: u64,
    ) -> Result<Vec<f64>> {
        let (psi, v) = best_response_state(set, pi, options.restarts, &mut fork(rng, tag))?;
        let losses: Vec<f64> = expectations(set, psi.amplitudes().as_slice()).iter().map(|e| e * e).collect();
        pool.push(set, psi);
        let v = v.max(pool.best_value(pi));
        if v < self.upper {
            self.upper = v;
            self.pi = pi.to_vec();
        }
        Ok(losses)
    }
}

/// Bracket `delta_A = min_pi max_psi E_pi <psi|P|psi>^2`. Multiplicative
/// weights on `pi` play against best responses; the states seen become a
/// witness pool, and the restricted game over the pool (an LP) is refined by
/// double oracle. `lower` comes from the pool's optimal mixture alone;
/// `upper` from best responses to the distributions visited, each raised to
/// at least the pool's best reply so that `lower <= upper` always holds.
pub fn delta_a_bracket(set: &PauliSet, options: &BracketOptions, rng: &mut Rng) -> Result<DeltaBracket> {
    let a = set.len();
    if a > MAX_BRACKET_SET {
        return Err(Error::param(format!("|A| = {a} exceeds {MAX_BRACKET_SET}")));
    }
    let iters = options.iterations.max(1);
    let eta = ((a as f64).ln().max(1e-3) / iters as f64).sqrt();
    let mut pool = Witnesses { states: Vec::new(), rows: Vec::new() };
    let mut log_w = vec![0.0; a];
    let mut avg = vec![0.0; a];
    let mut best = Incumbent { upper: f64::INFINITY, pi: vec![1.0 / a as f64; a] };
    for t in 0..iters {
        let top = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = log_w.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = w.iter().sum();
        let pi: Vec<f64> = w.iter().map(|x| x / total).collect();
        for (s, p) in avg.iter_mut().zip(&pi) {
            *s += p / iters as f64;
        }
        let losses = best.consider(set, options, &pi, &mut pool, rng, t as u64)?;
        for (l, loss) in log_w.iter_mut().zip(losses) {
            *l -= eta * loss;
        }
    }
    best.consider(set, options, &avg, &mut pool, rng, iters as u64)?;
    let mut lower;
    let mut mix;
    let mut round = 0;
    loop {
        let (value, row, col) = matrix_game(&pool.rows)?;
        lower = value;
        mix = row;
        let col = normalise(&col);
        let before = pool.states.len();
        best.consider(set, options, &col, &mut pool, rng, (iters + 1 + round) as u64)?;
        round += 1;
        if pool.states.len() == before || round >= options.refinements || best.upper - lower < 1e-9 {
            break;
        }
    }
    let Incumbent { upper, pi: upper_pi } = best;
    // rounding in the LP may leave lower a hair above upper
    let lower = lower.min(upper);
    let keep: Vec<usize> = (0..mix.len()).filter(|&i| mix[i] > 1e-12).collect();
    let weights = normalise(&keep.iter().map(|&i| mix[i]).collect::<Vec<_>>());
    let witness = StateEnsemble::new(keep.iter().map(|&i| pool.states[i].clone()).collect(), weights).ok();
    let upper_relaxation = if 2 * set.n() <= crate::pauli::dense_cap() {
        Some(symmetric_relaxation(set, &upper_pi)?)
    } else {
        None
    };
    Ok(DeltaBracket {
        lower,
        upper,
        upper_relaxation,
        pi: upper_pi,
        witness_count: witness.as_ref().map_or(0, |w| w.states().len()),
        witness,
        iterations: iters,
    })
}

fn normalise(v: &[f64]) -> Vec<f64> {
    let clipped: Vec<f64> = v.iter().map(|x| x.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return vec![1.0 / v.len() as f64; v.len()];
    }
    clipped.iter().map(|x| x / total).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DeltaKind {
    /// Union of `m` disjoint families.
    Families { m: usize },
    /// `m` pairwise anticommuting strings.
    Noncommuting { m: usize },
    /// Any set of the given size on `n` qubits.
    SizeBound { size: usize, n: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaValue {
    Exact(f64),
    Interval(f64, f64),
    AtMost(f64),
}

pub fn closed_form_delta(kind: DeltaKind) -> Result<DeltaValue> {
    match kind {
        DeltaKind::Families { m } if m > 0 => Ok(DeltaValue::Exact(1.0 / m as f64)),
        DeltaKind::Noncommuting { m } if m > 0 => {
            let harmonic: f64 = (1..=m).map(|i| 1.0 / i as f64).sum();
            Ok(DeltaValue::Interval(1.0 / m as f64, harmonic / m as f64))
        }
        DeltaKind::SizeBound { size, n } if size > 0 => Ok(DeltaValue::AtMost((1u64 << n) as f64 / size as f64)),
        _ => Err(Error::param(format!("invalid closed form request {kind:?}"))),
    }
}

/// `E_{P~pi} chi^2_M(rho_P^{(x)c} || rho_m^{(x)c})` with
/// `rho_P = (I + 3 eps P) / 2^n`, evaluated exactly from the POVM's traces
/// against `P^S` so no `c n`-qubit state is formed.
pub fn chi2_master(set: &PauliSet, pi: &[f64], povm: &Povm, c: usize, eps: f64) -> Result<f64> {
    check_pi(set, pi)?;
    if !(1..=2).contains(&c) {
        return Err(Error::param(format!("c = {c} not supported (1 or 2)")));
    }
    let n = set.n();
    if povm.n() != c * n {
        return Err(Error::SizeMismatch { left: povm.n(), right: c * n });
    }
    check_cap("chi2 master", c * n)?;
    let dim = (1u64 << (c * n)) as f64;
    let subsets: Vec<Vec<usize>> = (1u32..1 << c).map(|m| (0..c).filter(|j| m >> j & 1 == 1).collect()).collect();
    let traces: Vec<f64> = povm.elements().iter().map(|f| f.trace().re).collect();
    let mut acc = 0.0;
    for (p, w) in set.iter().zip(pi) {
        if *w == 0.0 {
            continue;
        }
        let embedded: Vec<(PauliString, i32)> =
            subsets.iter().map(|s| Ok((embed(p, s, c)?, s.len() as i32))).collect::<Result<_>>()?;
        let mut chi = 0.0;
        for (f, tr) in povm.elements().iter().zip(&traces) {
            if *tr <= 0.0 {
                continue;
            }
            let diff: f64 = embedded.iter().map(|(ps, k)| (3.0 * eps).powi(*k) * ps.trace_with(f).re).sum::<f64>() / dim;
            chi += diff * diff / (tr / dim);
        }
        acc += w * chi;
    }
    Ok(acc)
}

/// Rank-one POVM `{w_s |phi_s><phi_s|}` read as the state ensemble
/// `{phi_s with probability w_s / 2^n}`.
pub fn povm_as_ensemble(povm: &Povm) -> Result<StateEnsemble> {
    let dim = (1u64 << povm.n()) as f64;
    let mut states = Vec::new();
    let mut weights = Vec::new();
    for f in povm.elements() {
        let tr = f.trace().re;
        if tr <= 1e-14 {
            continue;
        }
        let eig = f.clone().symmetric_eigen();
        let (i, top) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty");
        if (top - tr).abs() > 1e-9 * tr.max(1.0) {
            return Err(Error::InvalidPovm("element is not rank one".into()));
        }
        states.push(PureState::new(eig.eigenvectors.column(i).into_owned())?);
        weights.push(tr / dim);
    }
    StateEnsemble::new(states, weights)
}
