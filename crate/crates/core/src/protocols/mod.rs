//! Estimation protocols and their reports.
//!
//! Every protocol here is a simulation: it is handed the true state, computes
//! the exact outcome distribution of each measurement it would perform, and
//! samples from it with an explicit generator. Reports carry the true values
//! alongside the estimates so errors can be read off directly.

mod bell;
mod generic;
mod purity;
mod single_copy;

pub use bell::{
    bell_abs_protocol, k_memory_distribution, k_memory_protocol, sign_recovery, two_copy_full, KMemoryOptions,
    SigmaMode,
};
pub use generic::{generic_cm_estimator, GenericCmModel, PovmEnsemble};
pub use purity::{purity_repetitions, purity_test_k, PurityMode, PurityReport, Verdict};
pub use single_copy::{clifford_protocol, family_ensemble, no_memory_protocol, StateEnsemble};

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{PauliSet, PauliString};
use crate::quantum::{expectation, DensityMatrix};
use crate::rng::{fork, Rng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliEstimate {
    pub pauli: PauliString,
    pub estimate: f64,
    /// Absolute-value estimate from a first stage, when there was one.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub abs_estimate: Option<f64>,
    pub target: f64,
    pub error: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageBudget {
    pub name: String,
    pub rounds: u64,
    pub copies_per_round: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub protocol: String,
    pub n: usize,
    pub estimates: Vec<PauliEstimate>,
    pub stages: Vec<StageBudget>,
    /// Sum over stages of `rounds * copies_per_round`.
    pub copies: u64,
    /// Filled in by callers that own the seed.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    pub wall_ms: f64,
}

impl ProtocolReport {
    pub(crate) fn new(protocol: &str, n: usize) -> Self {
        ProtocolReport { protocol: protocol.into(), n, estimates: Vec::new(), stages: Vec::new(), copies: 0, seed: None, wall_ms: 0.0 }
    }

    pub(crate) fn add_stage(&mut self, name: &str, rounds: u64, copies_per_round: u64) {
        self.copies += rounds * copies_per_round;
        self.stages.push(StageBudget { name: name.into(), rounds, copies_per_round });
    }

    pub(crate) fn push(&mut self, pauli: PauliString, estimate: f64, target: f64) {
        self.estimates.push(PauliEstimate {
            pauli,
            estimate,
            abs_estimate: None,
            target,
            error: (estimate - target).abs(),
            note: None,
        });
    }

    pub(crate) fn note_last(&mut self, note: &str) {
        if let Some(e) = self.estimates.last_mut() {
            e.note = Some(note.into());
        }
    }

    pub fn max_error(&self) -> f64 {
        self.estimates.iter().map(|e| e.error).fold(0.0, f64::max)
    }

    /// Largest `| |abs_estimate| - |target| |` over estimates that have one.
    pub fn max_abs_error(&self) -> f64 {
        self.estimates
            .iter()
            .filter_map(|e| e.abs_estimate.map(|a| (a - e.target.abs()).abs()))
            .fold(0.0, f64::max)
    }

    pub fn estimate_of(&self, p: &PauliString) -> Option<&PauliEstimate> {
        self.estimates.iter().find(|e| &e.pauli == p)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub(crate) struct Clock(Instant);

impl Clock {
    pub(crate) fn start() -> Self {
        Clock(Instant::now())
    }

    pub(crate) fn stop(self, report: &mut ProtocolReport) {
        report.wall_ms = self.0.elapsed().as_secs_f64() * 1e3;
    }
}

pub(crate) fn targets(set: &PauliSet, rho: &DensityMatrix) -> Result<Vec<f64>> {
    set.iter().map(|p| expectation(p, rho)).collect()
}

pub(crate) fn check_set(set: &PauliSet, rho: &DensityMatrix) -> Result<()> {
    if set.n() != rho.n() {
        Err(Error::SizeMismatch { left: set.n(), right: rho.n() })
    } else {
        Ok(())
    }
}

/// Round budgets matching the guarantees each protocol is built around.
pub mod budget {
    fn ceil(v: f64) -> u64 {
        v.ceil().max(1.0) as u64
    }

    /// Pauli-conjugated single-copy measurements: `16 ln(30|A|) / (eps^2 delta)`.
    pub fn no_memory(eps: f64, delta: f64, set_size: usize) -> u64 {
        ceil(16.0 * (30.0 * set_size as f64).ln() / (eps * eps * delta))
    }

    /// Clifford families sampled from a colouring of value `zeta`: every
    /// string is seen about `T / zeta` times, which Hoeffding turns into
    /// `4 zeta ln(20|A|) / eps^2`.
    pub fn clifford(eps: f64, zeta: f64, set_size: usize) -> u64 {
        ceil(4.0 * zeta * (20.0 * set_size as f64).ln() / (eps * eps))
    }

    /// Bell sampling for absolute values: `8 ln(30|A|) / eps^4`.
    pub fn bell(eps: f64, set_size: usize) -> u64 {
        ceil(8.0 * (30.0 * set_size as f64).ln() / eps.powi(4))
    }

    /// Products `tr(P sigma) tr(P rho)` to within `eps^2`: `2 ln(20|A|) / eps^4`.
    pub fn sign(eps: f64, set_size: usize) -> u64 {
        ceil(2.0 * (20.0 * set_size as f64).ln() / eps.powi(4))
    }

    /// Per covering group, squared values to within `eps^2` for all
    /// `2^{n+k}` strings of the group, failure `1/(10 (2^{n-k} + 1))`.
    pub fn k_memory(eps: f64, n: usize, k: usize) -> u64 {
        let groups = (1u64 << (n - k)) as f64 + 1.0;
        let per_group = (1u64 << (n + k)) as f64;
        ceil(2.0 * (20.0 * per_group * groups).ln() / eps.powi(4))
    }

    /// Generic `(c, M)` estimator: `16 * 100^c ln(30|A|) / delta`.
    pub fn generic(c: usize, delta: f64, set_size: usize) -> u64 {
        ceil(16.0 * 100f64.powi(c as i32) * (30.0 * set_size as f64).ln() / delta)
    }
}

/// Lower median; empty input is an error.
pub fn median_amplify(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Empty("median of no values"));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v[(v.len() - 1) / 2])
}

/// Per-string lower median across repeated runs of the same protocol.
pub fn median_of_reports(reports: &[ProtocolReport]) -> Result<ProtocolReport> {
    let first = reports.first().ok_or(Error::Empty("no reports"))?;
    let mut out = ProtocolReport::new(&format!("median({})", first.protocol), first.n);
    for (i, e) in first.estimates.iter().enumerate() {
        let vals: Vec<f64> = reports.iter().map(|r| r.estimates[i].estimate).collect();
        out.push(e.pauli, median_amplify(&vals)?, e.target);
    }
    for r in reports {
        for s in &r.stages {
            out.add_stage(&s.name, s.rounds, s.copies_per_round);
        }
        out.wall_ms += r.wall_ms;
    }
    Ok(out)
}

/// Worst-case failure of the lower median of `reps` draws when each draw is
/// independently correct with probability `p_correct`: the wrong draws all
/// land on one side, so the median fails once `ceil(reps / 2)` are wrong.
pub fn median_failure_probability(reps: usize, p_correct: f64) -> f64 {
    let q = 1.0 - p_correct;
    let need = reps.div_ceil(2);
    let mut total = 0.0;
    let mut binom = 1.0f64;
    for w in 0..=reps {
        if w > 0 {
            binom *= (reps - w + 1) as f64 / w as f64;
        }
        if w >= need {
            total += binom * q.powi(w as i32) * p_correct.powi((reps - w) as i32);
        }
    }
    total
}

/// Repetitions used by [`oblivious_wrapper`]: `ceil(5 ln |A|)`, at least 1.
pub fn oblivious_repetitions(set_size: usize) -> usize {
    ((5.0 * (set_size as f64).ln()).ceil() as usize).max(1)
}

/// Run a protocol that targets a single string on every member of `set`,
/// repeating it and taking the lower median per string. `single` returns the
/// estimate and the copies it used.
pub fn oblivious_wrapper<F>(set: &PauliSet, rho: &DensityMatrix, rng: &mut Rng, mut single: F) -> Result<ProtocolReport>
where
    F: FnMut(&PauliString, &DensityMatrix, &mut Rng) -> Result<(f64, u64)>,
{
    check_set(set, rho)?;
    let clock = Clock::start();
    let reps = oblivious_repetitions(set.len());
    let mut report = ProtocolReport::new("oblivious", set.n());
    let mut copies = 0;
    for (i, p) in set.iter().enumerate() {
        let mut vals = Vec::with_capacity(reps);
        for r in 0..reps {
            let mut sub = fork(rng, (i * reps + r) as u64);
            let (v, used) = single(p, rho, &mut sub)?;
            copies += used;
            vals.push(v);
        }
        report.push(*p, median_amplify(&vals)?, expectation(p, rho)?);
    }
    report.add_stage("single-string runs", copies, 1);
    clock.stop(&mut report);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::rho_p;
    use crate::rng::stream;
    use rand::Rng as _;

    #[test]
    fn lower_median() {
        assert_eq!(median_amplify(&[3.0, 1.0, 2.0]).unwrap(), 2.0);
        assert_eq!(median_amplify(&[4.0, 1.0, 3.0, 2.0]).unwrap(), 2.0);
        assert!(median_amplify(&[]).is_err());
    }

    #[test]
    fn repetitions_formula() {
        assert_eq!(oblivious_repetitions(1), 1);
        assert_eq!(oblivious_repetitions(16), (5.0 * 16f64.ln()).ceil() as usize);
    }

    #[test]
    fn median_failure_matches_simulation() {
        // 10n repetitions at n = 2 of a 2/3-correct estimator, wrong draws low,
        // which is the worse side for a lower median
        let reps = 20;
        let exact = median_failure_probability(reps, 2.0 / 3.0);
        let mut rng = stream(42, 0);
        let trials = 100_000;
        let mut fails = 0;
        for _ in 0..trials {
            let v: Vec<f64> = (0..reps).map(|_| if rng.random::<f64>() < 2.0 / 3.0 { 0.0 } else { -1.0 }).collect();
            if median_amplify(&v).unwrap() != 0.0 {
                fails += 1;
            }
        }
        let rate = fails as f64 / trials as f64;
        let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!((rate - exact).abs() < 3.0 * sigma, "{rate} vs {exact}");
        assert!(median_failure_probability(1, 2.0 / 3.0) - 1.0 / 3.0 < 1e-15);
    }

    #[test]
    fn wrapper_success_matches_exact_rate() {
        // a single-string protocol that is right with probability 2/3
        let set = PauliSet::parse_text("XI\nIZ\nYY\nZZ\nXX\n").unwrap();
        let rho = rho_p(&"ZZ".parse().unwrap(), 0.2).unwrap().state;
        let reps = oblivious_repetitions(set.len());
        let exact = (1.0 - median_failure_probability(reps, 2.0 / 3.0)).powi(set.len() as i32);
        let seeds = 400;
        let mut ok = 0;
        for seed in 0..seeds {
            let mut rng = stream(seed, 0);
            let rep = oblivious_wrapper(&set, &rho, &mut rng, |p, r, g| {
                let t = expectation(p, r)?;
                Ok((if g.random::<f64>() < 2.0 / 3.0 { t } else { t + 1.0 }, 1))
            })
            .unwrap();
            if rep.max_error() < 1e-12 {
                ok += 1;
            }
        }
        let rate = ok as f64 / seeds as f64;
        let sigma = (exact * (1.0 - exact) / seeds as f64).sqrt();
        assert!((rate - exact).abs() < 3.0 * sigma, "{rate} vs {exact}");
    }
}
