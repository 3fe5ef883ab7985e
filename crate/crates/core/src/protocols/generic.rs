use super::{check_set, targets, Clock, ProtocolReport};
use crate::error::{Error, Result};
use crate::pauli::{all_paulis, check_cap, embed, symplectic_fourier, PauliIndex, PauliSet, PauliString};
use crate::quantum::{pauli_spectrum, DensityMatrix, OutcomeDistribution, Povm};
use crate::rng::Rng;

/// Weighted list of POVMs on `c * n` qubits.
#[derive(Clone, Debug)]
pub struct PovmEnsemble {
    entries: Vec<(Povm, f64)>,
}

impl PovmEnsemble {
    pub fn new(entries: Vec<(Povm, f64)>) -> Result<Self> {
        let n = entries.first().ok_or(Error::Empty("POVM ensemble"))?.0.n();
        if entries.iter().any(|(m, _)| m.n() != n) {
            return Err(Error::param("ensemble POVMs act on different qubit counts"));
        }
        let total: f64 = entries.iter().map(|e| e.1).sum();
        if entries.iter().any(|e| e.1 < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::param(format!("ensemble weights must be a distribution (sum {total})")));
        }
        Ok(PovmEnsemble { entries })
    }

    pub fn single(povm: Povm) -> Self {
        PovmEnsemble { entries: vec![(povm, 1.0)] }
    }

    /// Uniform mixture of the eigenbasis measurements of every group in the
    /// `n`-qubit stabilizer covering.
    pub fn clifford_covering(n: usize) -> Result<Self> {
        let cov = crate::stabilizer::stabilizer_covering(n)?;
        let w = 1.0 / cov.len() as f64;
        let entries = cov.groups().iter().map(|g| Ok((crate::stabilizer::clifford_povm(g)?, w))).collect::<Result<_>>()?;
        Ok(PovmEnsemble { entries })
    }

    pub fn n(&self) -> usize {
        self.entries[0].0.n()
    }

    pub fn entries(&self) -> &[(Povm, f64)] {
        &self.entries
    }
}

/// One POVM element with its ensemble weight, trace and Pauli spectrum
/// `f(R) = tr(F R)`.
#[derive(Clone, Debug)]
struct Element {
    weight: f64,
    trace: f64,
    spectrum: Vec<f64>,
}

/// Exact bookkeeping for the generic `c`-copy estimator: POVM spectra and
/// the selection statistic for each copy subset.
#[derive(Clone, Debug)]
pub struct GenericCmModel {
    n: usize,
    c: usize,
    elements: Vec<Element>,
}

impl GenericCmModel {
    pub fn new(ensemble: &PovmEnsemble, c: usize) -> Result<Self> {
        if !(1..=2).contains(&c) {
            return Err(Error::param(format!("c = {c} not supported (1 or 2)")));
        }
        let total = ensemble.n();
        if total % c != 0 {
            return Err(Error::param(format!("{total} qubits do not split into {c} copies")));
        }
        check_cap("generic estimator", total)?;
        let mut elements = Vec::new();
        for (povm, q) in ensemble.entries() {
            for f in povm.elements() {
                let spectrum: Vec<f64> = all_paulis(total).map(|r| r.trace_with(f).re).collect();
                elements.push(Element { weight: *q, trace: spectrum[0], spectrum });
            }
        }
        Ok(GenericCmModel { n: total / c, c, elements })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> usize {
        self.c
    }

    /// Number of `(l, s)` pairs.
    pub fn outcomes(&self) -> usize {
        self.elements.len()
    }

    /// `Pr[l, s] = q_l tr(F) / 2^{cn}`, independent of the state.
    pub fn joint_weight(&self, ls: usize) -> f64 {
        let e = &self.elements[ls];
        e.weight * e.trace / (1u64 << (self.c * self.n)) as f64
    }

    /// `Pr[Q | l, s] = tr(Q F Q rho^{(x)c}) / (2^{cn} tr F)` over all `Q`.
    pub fn conditional(&self, ls: usize, rho: &DensityMatrix) -> Result<OutcomeDistribution> {
        let lam = pauli_spectrum(rho);
        self.conditional_from_spectrum(ls, &lam)
    }

    fn conditional_from_spectrum(&self, ls: usize, lam: &[f64]) -> Result<OutcomeDistribution> {
        let cn = self.c * self.n;
        let e = &self.elements[ls];
        let block = 1usize << (2 * self.n);
        let f: Vec<f64> = e
            .spectrum
            .iter()
            .enumerate()
            .map(|(r, v)| {
                // tr(R rho^{(x)c}) factorises over the copies
                let mut prod = *v;
                for j in 0..self.c {
                    prod *= lam[(r >> (2 * self.n * (self.c - 1 - j))) % block];
                }
                prod
            })
            .collect();
        let scale = 1.0 / ((1u128 << (2 * cn)) as f64 * e.trace);
        OutcomeDistribution::from_raw(symplectic_fourier(&f, cn).into_iter().map(|v| v * scale).collect())
    }

    /// `a = tr(F P^S) / tr F`, so that `E[sign(P^S, Q) | l, s] = a tr(P rho)^|S|`.
    pub fn coefficient(&self, ls: usize, embedded: &PauliString) -> f64 {
        let e = &self.elements[ls];
        e.spectrum[embedded.index().value() as usize] / e.trace
    }

    /// `mu(P, S) = sum_{l,s} q_l tr(F P^S)^2 / (2^{cn} tr F)`.
    pub fn mu(&self, p: &PauliString, subset: &[usize]) -> Result<f64> {
        let ps = embed(p, subset, self.c)?;
        let idx = ps.index().value() as usize;
        let scale = (1u64 << (self.c * self.n)) as f64;
        Ok(self.elements.iter().map(|e| e.weight * e.spectrum[idx].powi(2) / (scale * e.trace)).sum())
    }

    /// Nonempty subsets of the copies, smaller first.
    pub fn subsets(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> =
            (1u32..1 << self.c).map(|mask| (0..self.c).filter(|j| mask >> j & 1 == 1).collect()).collect();
        out.sort_by_key(|s: &Vec<usize>| s.len());
        out
    }

    /// The subset maximising `(eps/3)^{2|S|} mu(P, S)`; ties keep the smaller
    /// subset. `None` when every `mu` is zero.
    pub fn best_subset(&self, p: &PauliString, eps: f64) -> Result<Option<Vec<usize>>> {
        let mut best: Option<(f64, Vec<usize>)> = None;
        for s in self.subsets() {
            let score = (eps / 3.0).powi(2 * s.len() as i32) * self.mu(p, &s)?;
            if score > 0.0 && best.as_ref().is_none_or(|(b, _)| score > *b) {
                best = Some((score, s));
            }
        }
        Ok(best.map(|b| b.1))
    }
}

/// Each round draws `l`, a uniformly random `Q` on `c n` qubits, and measures
/// `rho^{(x)c}` with `{Q F_{l,s} Q}_s`. For each `P` the copy subset `S_P` is
/// fixed in advance from the exact `mu`, and
/// `E = sum_t a_t sign(P^S, Q_t) / sum_t a_t^2` estimates `tr(P rho)^{|S|}`.
/// Singletons keep their sign; larger subsets report `|E|^{1/|S|}` against
/// `|tr(P rho)|`.
pub fn generic_cm_estimator(
    set: &PauliSet,
    model: &GenericCmModel,
    rho: &DensityMatrix,
    eps: f64,
    rounds: u64,
    rng: &mut Rng,
) -> Result<ProtocolReport> {
    check_set(set, rho)?;
    if model.n() != rho.n() {
        return Err(Error::SizeMismatch { left: model.n(), right: rho.n() });
    }
    let clock = Clock::start();
    let lam = pauli_spectrum(rho);
    let cn = model.c * model.n;
    let joint =
        OutcomeDistribution::from_raw((0..model.outcomes()).map(|ls| model.joint_weight(ls)).collect())?.sampler();
    let conditionals = (0..model.outcomes())
        .map(|ls| Ok(model.conditional_from_spectrum(ls, &lam)?.sampler()))
        .collect::<Result<Vec<_>>>()?;

    struct Plan {
        embedded: PauliString,
        size: usize,
        coef: Vec<f64>,
    }
    let mut plans: Vec<Option<Plan>> = Vec::with_capacity(set.len());
    for p in set.iter() {
        plans.push(match model.best_subset(p, eps)? {
            Some(s) => {
                let embedded = embed(p, &s, model.c)?;
                let coef = (0..model.outcomes()).map(|ls| model.coefficient(ls, &embedded)).collect();
                Some(Plan { embedded, size: s.len(), coef })
            }
            None => None,
        });
    }

    let mut num = vec![0.0; set.len()];
    let mut den = vec![0.0; set.len()];
    for _ in 0..rounds {
        let ls = joint.draw(rng);
        let q = PauliIndex::new(cn, conditionals[ls].draw(rng) as u128)?.pauli();
        for (i, plan) in plans.iter().enumerate() {
            if let Some(plan) = plan {
                let a = plan.coef[ls];
                num[i] += a * plan.embedded.sign_against(&q);
                den[i] += a * a;
            }
        }
    }

    let mut report = ProtocolReport::new("generic", model.n);
    for (i, (p, t)) in set.iter().zip(targets(set, rho)?).enumerate() {
        match &plans[i] {
            Some(plan) if den[i] > 0.0 => {
                let raw = num[i] / den[i];
                if plan.size == 1 {
                    report.push(*p, raw, t);
                    report.estimates.last_mut().unwrap().abs_estimate = Some(raw.abs());
                } else {
                    let abs = raw.max(0.0).min(1.0).powf(1.0 / plan.size as f64);
                    report.push(*p, abs, t.abs());
                    report.estimates.last_mut().unwrap().abs_estimate = Some(abs);
                    report.note_last("absolute value only");
                }
            }
            _ => {
                report.push(*p, 0.0, t);
                report.note_last("ensemble uninformative for P");
            }
        }
    }
    report.add_stage("generic rounds", rounds, model.c as u64);
    clock.stop(&mut report);
    Ok(report)
}
