use nalgebra::DVector;

use super::{check_set, targets, Clock, ProtocolReport};
use crate::coloring::MeasurementPlan;
use crate::error::{Error, Result};
use crate::pauli::{symplectic_fourier, PauliSet, PauliString};
use crate::quantum::{pauli_spectrum, DensityMatrix, OutcomeDistribution, PureState, Sampler};
use crate::rng::Rng;
use crate::stabilizer::{StabilizerBasis, StabilizerGroup};

/// Weighted list of pure states.
#[derive(Clone, Debug)]
pub struct StateEnsemble {
    states: Vec<PureState>,
    weights: Vec<f64>,
}

impl StateEnsemble {
    pub fn new(states: Vec<PureState>, weights: Vec<f64>) -> Result<Self> {
        let n = states.first().ok_or(Error::Empty("ensemble"))?.n();
        if weights.len() != states.len() {
            return Err(Error::param("ensemble weight count differs from state count"));
        }
        if states.iter().any(|s| s.n() != n) {
            return Err(Error::param("ensemble states on different qubit counts"));
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| *w < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::param(format!("ensemble weights must be a distribution (sum {total})")));
        }
        Ok(StateEnsemble { states, weights })
    }

    pub fn uniform(states: Vec<PureState>) -> Result<Self> {
        let w = vec![1.0 / states.len().max(1) as f64; states.len()];
        Self::new(states, w)
    }

    pub fn n(&self) -> usize {
        self.states[0].n()
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `E_l <psi_l|P|psi_l>^2`, the per-string advantage of this ensemble.
    pub fn game_value(&self, p: &PauliString) -> Result<f64> {
        let mut acc = 0.0;
        for (s, w) in self.states.iter().zip(&self.weights) {
            let v = s.expectation(p)?;
            acc += w * v * v;
        }
        Ok(acc)
    }
}

/// Uniform mixture of the all-`+1` joint eigenstates of maximal groups.
pub fn family_ensemble(groups: &[StabilizerGroup]) -> Result<StateEnsemble> {
    let mut states = Vec::with_capacity(groups.len());
    for g in groups {
        if !g.is_maximal() {
            return Err(Error::NotMaximal { rank: g.rank(), n: g.n() });
        }
        let basis = StabilizerBasis::new(g.clone());
        let proj = &basis.projectors()?[0];
        let col = (0..proj.ncols())
            .max_by(|&a, &b| proj.column(a).norm().total_cmp(&proj.column(b).norm()))
            .expect("nonempty projector");
        let v: DVector<_> = proj.column(col).into_owned();
        let norm = v.norm();
        states.push(PureState::new(v / nalgebra::Complex::new(norm, 0.0))?);
    }
    StateEnsemble::uniform(states)
}

/// Each round draws `psi_l` from the ensemble and a uniformly random `Q`, and
/// measures `{2^-n Q |psi_l><psi_l| Q}_Q`. The estimate for `P` is
/// `sum_t <P>_l sign(P, Q_t) / sum_t <P>_l^2`.
pub fn no_memory_protocol(
    set: &PauliSet,
    ensemble: &StateEnsemble,
    rho: &DensityMatrix,
    rounds: u64,
    rng: &mut Rng,
) -> Result<ProtocolReport> {
    check_set(set, rho)?;
    if ensemble.n() != rho.n() {
        return Err(Error::SizeMismatch { left: ensemble.n(), right: rho.n() });
    }
    let clock = Clock::start();
    let n = rho.n();
    let lam = pauli_spectrum(rho);
    let scale = 1.0 / (1u64 << (2 * n)) as f64;
    let pick = OutcomeDistribution::from_raw(ensemble.weights.clone())?.sampler();
    let mut samplers: Vec<Sampler> = Vec::with_capacity(ensemble.states.len());
    let mut coefs: Vec<Vec<f64>> = Vec::with_capacity(ensemble.states.len());
    for s in &ensemble.states {
        let spec = s.pauli_spectrum();
        let f: Vec<f64> = spec.iter().zip(&lam).map(|(a, b)| a * b).collect();
        let dist = OutcomeDistribution::from_raw(symplectic_fourier(&f, n).into_iter().map(|v| v * scale).collect())?;
        samplers.push(dist.sampler());
        coefs.push(set.iter().map(|p| spec[p.index().value() as usize]).collect());
    }
    let mut num = vec![0.0; set.len()];
    let mut den = vec![0.0; set.len()];
    for _ in 0..rounds {
        let l = pick.draw(rng);
        let q = crate::pauli::PauliIndex::new(n, samplers[l].draw(rng) as u128)?.pauli();
        for (i, p) in set.iter().enumerate() {
            let c = coefs[l][i];
            num[i] += c * p.sign_against(&q);
            den[i] += c * c;
        }
    }
    let mut report = ProtocolReport::new("nomem", n);
    for ((p, t), (a, b)) in set.iter().zip(targets(set, rho)?).zip(num.iter().zip(&den)) {
        let est = if *b > 0.0 { a / b } else { 0.0 };
        report.push(*p, est, t);
        if *b == 0.0 {
            report.note_last("uninformative ensemble for P");
        }
    }
    report.add_stage("conjugated single-copy", rounds, 1);
    clock.stop(&mut report);
    Ok(report)
}

/// Each round draws a family from the plan and measures its eigenbasis;
/// every member of the set in that family reads off `sign(s) (-1)^{<e,s>}`.
pub fn clifford_protocol(
    set: &PauliSet,
    plan: &MeasurementPlan,
    rho: &DensityMatrix,
    rounds: u64,
    rng: &mut Rng,
) -> Result<ProtocolReport> {
    check_set(set, rho)?;
    let clock = Clock::start();
    let lam = pauli_spectrum(rho);
    let pick = OutcomeDistribution::from_raw(plan.families.iter().map(|f| f.probability).collect())?.sampler();
    let mut fams = Vec::with_capacity(plan.families.len());
    for f in &plan.families {
        let basis = StabilizerBasis::new(f.group.clone());
        let sampler = basis.distribution_from_spectrum(&lam)?.sampler();
        let members: Vec<(usize, u64)> = set
            .iter()
            .enumerate()
            .filter_map(|(i, p)| f.group.decompose(p).map(|c| (i, c)))
            .collect();
        fams.push((basis, sampler, members));
    }
    let mut sum = vec![0.0; set.len()];
    let mut count = vec![0u64; set.len()];
    for _ in 0..rounds {
        let (basis, sampler, members) = &fams[pick.draw(rng)];
        let e = sampler.draw(rng) as u64;
        for &(i, c) in members {
            sum[i] += basis.readout(c, e);
            count[i] += 1;
        }
    }
    let mut report = ProtocolReport::new("clifford", rho.n());
    for (i, (p, t)) in set.iter().zip(targets(set, rho)?).enumerate() {
        let est = if count[i] > 0 { sum[i] / count[i] as f64 } else { 0.0 };
        report.push(*p, est, t);
        if count[i] == 0 {
            report.note_last("missing: never measured");
        }
    }
    report.add_stage("clifford families", rounds, 1);
    clock.stop(&mut report);
    Ok(report)
}
