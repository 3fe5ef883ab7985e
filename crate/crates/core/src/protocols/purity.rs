use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{purity_event_probability, DensityMatrix, OutcomeDistribution};
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PurityMode {
    /// One Bernoulli draw per repetition at the exact event probability.
    #[default]
    Bernoulli,
    /// Sample both computational-basis outcomes, then the swap test.
    Trajectory,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pure,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PurityReport {
    pub n: usize,
    pub k: usize,
    pub verdict: Verdict,
    pub repetitions: u64,
    /// Repetitions whose swap test came out antisymmetric.
    pub events: u64,
    pub event_probability: f64,
    pub copies: u64,
}

/// Repetitions of the `k`-memory purity test: `10 * 2^{n-k}`.
pub fn purity_repetitions(n: usize, k: usize) -> u64 {
    10 << (n - k)
}

/// Purity test with `k` qubits of memory. Each repetition measures the
/// first `n - k` qubits of two copies in the computational basis; if they
/// agree, the swap test runs on the remaining `k` qubits. Any antisymmetric
/// outcome means mixed.
pub fn purity_test_k(rho: &DensityMatrix, k: usize, mode: PurityMode, rng: &mut Rng) -> Result<PurityReport> {
    let n = rho.n();
    if k > n {
        return Err(Error::param(format!("k = {k} exceeds n = {n}")));
    }
    let reps = purity_repetitions(n, k);
    let p = purity_event_probability(rho, k)?;
    let events = match mode {
        PurityMode::Bernoulli => (0..reps).filter(|_| rng.random::<f64>() < p).count() as u64,
        PurityMode::Trajectory => trajectory_events(rho, k, reps, rng)?,
    };
    Ok(PurityReport {
        n,
        k,
        verdict: if events > 0 { Verdict::Mixed } else { Verdict::Pure },
        repetitions: reps,
        events,
        event_probability: p,
        copies: 2 * reps,
    })
}

fn trajectory_events(rho: &DensityMatrix, k: usize, reps: u64, rng: &mut Rng) -> Result<u64> {
    let block = 1usize << k;
    let outer = 1usize << (rho.n() - k);
    let m = rho.matrix();
    let mut weights = Vec::with_capacity(outer);
    let mut antisym = Vec::with_capacity(outer);
    for x in 0..outer {
        let view = m.view((x * block, x * block), (block, block));
        let tr = view.trace().re;
        weights.push(tr);
        // swap test on two copies of the normalised block
        antisym.push(if tr > 0.0 {
            let tr2: f64 = view.iter().map(|v| v.norm_sqr()).sum();
            ((1.0 - tr2 / (tr * tr)) / 2.0).max(0.0)
        } else {
            0.0
        });
    }
    let sampler = OutcomeDistribution::from_raw(weights)?.sampler();
    let mut events = 0;
    for _ in 0..reps {
        let (x1, x2) = (sampler.draw(rng), sampler.draw(rng));
        if x1 == x2 && rng.random::<f64>() < antisym[x1] {
            events += 1;
        }
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{haar_random_pure, maximally_mixed};
    use crate::rng::stream;

    #[test]
    fn pure_states_always_pass() {
        for seed in 0..20 {
            let rho = haar_random_pure(3, &mut stream(seed, 0)).unwrap().to_density();
            for k in 0..=3 {
                for mode in [PurityMode::Bernoulli, PurityMode::Trajectory] {
                    let rep = purity_test_k(&rho, k, mode, &mut stream(seed, k as u64)).unwrap();
                    assert_eq!(rep.verdict, Verdict::Pure);
                }
            }
        }
    }

    #[test]
    fn copies_and_repetitions() {
        let rho = maximally_mixed(4).unwrap();
        let rep = purity_test_k(&rho, 2, PurityMode::Bernoulli, &mut stream(0, 0)).unwrap();
        assert_eq!(rep.repetitions, 40);
        assert_eq!(rep.copies, 80);
        assert!((rep.event_probability - 3.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn trajectory_rate_matches_bernoulli() {
        let rho = maximally_mixed(3).unwrap();
        let k = 2;
        let p = purity_event_probability(&rho, k).unwrap();
        let mut rng = stream(5, 0);
        let trials = 4000;
        let mut events = 0;
        for _ in 0..trials {
            events += trajectory_events(&rho, k, 1, &mut rng).unwrap();
        }
        let rate = events as f64 / trials as f64;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((rate - p).abs() < 4.0 * sigma, "{rate} vs {p}");
    }
}
