use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{EnsembleChoice, ExperimentConfig, GenericPovm, ProtocolConfig};
use super::output::write_once;
use crate::analysis::{delta_a_bracket, BracketOptions};
use crate::coloring::{build_graph, fractional_coloring, schedule, MeasurementPlan};
use crate::error::{Error, Result};
use crate::pauli::PauliSet;
use crate::protocols::{
    bell_abs_protocol, budget, clifford_protocol, family_ensemble, generic_cm_estimator, k_memory_protocol,
    no_memory_protocol, purity_repetitions, purity_test_k, two_copy_full, GenericCmModel, KMemoryOptions,
    PovmEnsemble, ProtocolReport, PurityReport, SigmaMode, StateEnsemble, Verdict,
};
use crate::quantum::DensityMatrix;
use crate::rng::stream;
use crate::stabilizer::stabilizer_covering;

const STATE_STREAM: u64 = u64::MAX;
const SETUP_STREAM: u64 = u64::MAX - 1;

/// Outcome of one trial, small enough to keep for every seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialDigest {
    pub seed: u64,
    pub trial: usize,
    pub success: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_error: Option<f64>,
    pub copies: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub events: Option<u64>,
    /// Set when the trial failed with an error; such trials count as
    /// unsuccessful.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub trials: usize,
    pub failed: usize,
    pub successes: usize,
    /// Over all trials, failed ones included.
    pub success_fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub median_max_error: Option<f64>,
    pub mean_copies: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub tool_version: String,
    /// Rounds per stage as resolved from the budget (per group for `kmem`,
    /// repetitions for `purity`).
    pub rounds: u64,
    pub set_size: usize,
    pub state_purity: f64,
    pub trials: Vec<TrialDigest>,
    pub aggregate: Aggregate,
    /// Timing; the only field that differs between identical runs.
    pub wall_ms: f64,
    /// File the result was written to, if any.
    #[serde(skip)]
    pub written: Option<PathBuf>,
}

impl ExperimentResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// JSON with the timing field zeroed, for byte comparisons.
    pub fn canonical_json(&self) -> Result<String> {
        let mut c = self.clone();
        c.wall_ms = 0.0;
        c.to_json()
    }
}

/// Everything trials share, built once before the worker pool starts.
struct Prepared {
    rho: DensityMatrix,
    set: PauliSet,
    rounds: u64,
    kind: Prepped,
}

enum Prepped {
    Nomem(StateEnsemble),
    Clifford(MeasurementPlan),
    Bell,
    Twocopy(SigmaMode, Option<u64>),
    Kmem(usize, KMemoryOptions),
    Generic(Box<GenericCmModel>),
    Purity(usize, crate::protocols::PurityMode, Verdict),
}

fn prepare(cfg: &ExperimentConfig) -> Result<Prepared> {
    let n = cfg.n;
    let rho = cfg.state_spec()?.build(n, &mut stream(cfg.state_seed, STATE_STREAM))?;
    let set = match cfg.protocol {
        ProtocolConfig::Kmem { .. } | ProtocolConfig::Purity { .. } => PauliSet::nontrivial(n),
        _ => cfg.pauli_source()?.load(n)?,
    };
    let (eps, a, b) = (cfg.eps, set.len(), &cfg.budget);
    let (rounds, kind) = match &cfg.protocol {
        ProtocolConfig::Nomem { ensemble } => {
            let ens = match ensemble {
                EnsembleChoice::Covering => family_ensemble(stabilizer_covering(n)?.groups())?,
                EnsembleChoice::Bracket => delta_a_bracket(&set, &BracketOptions::default(), &mut stream(cfg.state_seed, SETUP_STREAM))?
                    .witness
                    .ok_or_else(|| Error::Config("bracket produced no witness ensemble".into()))?,
            };
            let delta = match b.delta {
                Some(d) => d,
                None => set.iter().map(|p| ens.game_value(p)).collect::<Result<Vec<_>>>()?.into_iter().fold(f64::INFINITY, f64::min),
            };
            if !(delta > 0.0) {
                return Err(Error::Config("ensemble has no advantage on some string".into()));
            }
            (b.apply(budget::no_memory(eps, delta, a)), Prepped::Nomem(ens))
        }
        ProtocolConfig::Clifford => {
            let g = build_graph(&set);
            let plan = schedule(&fractional_coloring(&g)?, &g)?;
            (b.apply(budget::clifford(eps, plan.zeta, a)), Prepped::Clifford(plan))
        }
        ProtocolConfig::Bell => (b.apply(budget::bell(eps, a)), Prepped::Bell),
        ProtocolConfig::Twocopy { sigma } => {
            let formula = budget::bell(eps / 3.0, a);
            let rounds = b.apply(formula);
            let over = (b.rounds.is_some() || b.scale != 1.0).then_some(rounds);
            (rounds, Prepped::Twocopy(sigma.unwrap_or(SigmaMode::Oracle), over))
        }
        ProtocolConfig::Kmem { k, sign } => {
            let rounds = b.apply(budget::k_memory(eps / 3.0, n, *k));
            let sign_rounds = (b.rounds.is_some() || b.scale != 1.0).then(|| b.apply(budget::sign(eps / 3.0, a)));
            let options = KMemoryOptions {
                rounds_per_group: Some(rounds),
                sign: sign.then_some(SigmaMode::Oracle),
                sign_rounds,
            };
            (rounds, Prepped::Kmem(*k, options))
        }
        ProtocolConfig::Generic { povm } => {
            let (ens, c) = match povm {
                GenericPovm::Bell => (PovmEnsemble::single(crate::quantum::bell_povm(n)?), 2),
                GenericPovm::Covering => (PovmEnsemble::clifford_covering(n)?, 1),
            };
            let model = GenericCmModel::new(&ens, c)?;
            let delta = match b.delta {
                Some(d) => d,
                None => {
                    // the estimator needs max_S (eps/3)^{2|S|} mu(P, S) >= delta / (2 100^c)
                    let mut worst = f64::INFINITY;
                    for p in set.iter() {
                        let score = match model.best_subset(p, eps)? {
                            Some(s) => (eps / 3.0).powi(2 * s.len() as i32) * model.mu(p, &s)?,
                            None => 0.0,
                        };
                        worst = worst.min(score);
                    }
                    2.0 * 100f64.powi(c as i32) * worst
                }
            };
            if !(delta > 0.0) {
                return Err(Error::Config("POVM ensemble is uninformative for some string".into()));
            }
            (b.apply(budget::generic(c, delta, a)), Prepped::Generic(Box::new(model)))
        }
        ProtocolConfig::Purity { k, mode } => {
            let truth = if rho.purity() > 1.0 - 1e-9 { Verdict::Pure } else { Verdict::Mixed };
            (purity_repetitions(n, *k), Prepped::Purity(*k, *mode, truth))
        }
    };
    Ok(Prepared { rho, set, rounds, kind })
}

fn estimate_digest(seed: u64, trial: usize, eps: f64, report: Result<ProtocolReport>) -> TrialDigest {
    match report {
        Ok(r) => {
            let e = r.max_error();
            TrialDigest { seed, trial, success: e <= eps, max_error: Some(e), copies: r.copies, verdict: None, events: None, failure: None }
        }
        Err(err) => failed(seed, trial, err),
    }
}

fn failed(seed: u64, trial: usize, err: Error) -> TrialDigest {
    TrialDigest {
        seed,
        trial,
        success: false,
        max_error: None,
        copies: 0,
        verdict: None,
        events: None,
        failure: Some(err.to_string()),
    }
}

fn run_trial(cfg: &ExperimentConfig, prep: &Prepared, seed: u64, trial: usize) -> TrialDigest {
    let rng = &mut stream(seed, trial as u64);
    let (set, rho, eps, t) = (&prep.set, &prep.rho, cfg.eps, prep.rounds);
    let report = match &prep.kind {
        Prepped::Nomem(ens) => no_memory_protocol(set, ens, rho, t, rng),
        Prepped::Clifford(plan) => clifford_protocol(set, plan, rho, t, rng),
        Prepped::Bell => bell_abs_protocol(set, rho, t, rng),
        Prepped::Twocopy(mode, over) => two_copy_full(set, rho, eps, *mode, *over, rng),
        Prepped::Kmem(k, options) => k_memory_protocol(rho, *k, eps, options, rng),
        Prepped::Generic(model) => generic_cm_estimator(set, model, rho, eps, t, rng),
        Prepped::Purity(k, mode, truth) => {
            return match purity_test_k(rho, *k, *mode, rng) {
                Ok(PurityReport { verdict, events, copies, .. }) => TrialDigest {
                    seed,
                    trial,
                    success: verdict == *truth,
                    max_error: None,
                    copies,
                    verdict: Some(verdict),
                    events: Some(events),
                    failure: None,
                },
                Err(e) => failed(seed, trial, e),
            };
        }
    };
    estimate_digest(seed, trial, eps, report)
}

fn aggregate(trials: &[TrialDigest]) -> Aggregate {
    let failed = trials.iter().filter(|t| t.failure.is_some()).count();
    let successes = trials.iter().filter(|t| t.success).count();
    let mut errors: Vec<f64> = trials.iter().filter_map(|t| t.max_error).collect();
    errors.sort_by(f64::total_cmp);
    Aggregate {
        trials: trials.len(),
        failed,
        successes,
        success_fraction: successes as f64 / trials.len().max(1) as f64,
        max_error: errors.last().copied(),
        median_max_error: (!errors.is_empty()).then(|| errors[(errors.len() - 1) / 2]),
        mean_copies: trials.iter().map(|t| t.copies as f64).sum::<f64>() / trials.len().max(1) as f64,
    }
}

/// Run every `(seed, trial)` pair of the config on a worker pool and
/// aggregate in seed order. Errors inside a trial mark that trial failed;
/// errors while preparing shared inputs fail the whole run. When
/// `output.dir` is set the result is written there without overwriting.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let clock = Instant::now();
    let prep = prepare(config)?;
    let tasks: Vec<(u64, usize)> =
        config.seeds.iter().flat_map(|&s| (0..config.trials).map(move |t| (s, t))).collect();
    let work = || tasks.par_iter().map(|&(s, t)| run_trial(config, &prep, s, t)).collect::<Vec<_>>();
    let trials = match config.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?
            .install(work),
        None => work(),
    };
    let mut result = ExperimentResult {
        config: config.clone(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        rounds: prep.rounds,
        set_size: prep.set.len(),
        state_purity: prep.rho.purity(),
        aggregate: aggregate(&trials),
        trials,
        wall_ms: clock.elapsed().as_secs_f64() * 1e3,
        written: None,
    };
    if let Some(dir) = &config.output.dir {
        let stem = config.output.name.as_deref().unwrap_or("result");
        result.written = Some(write_once(dir, stem, "json", result.to_json()?.as_bytes())?);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::PurityMode;

    #[test]
    fn smoke_round_trips_and_repeats() {
        let mut cfg = ExperimentConfig::new(ProtocolConfig::Clifford, 2, "haar", 0.2);
        cfg.seeds = vec![4, 5, 6];
        let a = run_experiment(&cfg).unwrap();
        let back = ExperimentResult::from_json(&a.to_json().unwrap()).unwrap();
        assert_eq!(back.canonical_json().unwrap(), a.canonical_json().unwrap());
        cfg.threads = Some(2);
        let mut b = run_experiment(&cfg).unwrap();
        b.config.threads = None;
        assert_eq!(a.canonical_json().unwrap(), b.canonical_json().unwrap());
        assert_eq!(a.aggregate.trials, 3);
        assert_eq!(a.trials.iter().map(|t| t.seed).collect::<Vec<_>>(), vec![4, 5, 6]);
    }

    #[test]
    fn failed_trials_count_against_success() {
        // search mode at rank 1 cannot fit a mixed state to within eps
        let mut cfg = ExperimentConfig::new(ProtocolConfig::Twocopy { sigma: Some(SigmaMode::Search { rank: 1 }) }, 1, "mixed", 0.05);
        cfg.budget.rounds = Some(5000);
        cfg.seeds = vec![0, 1];
        let r = run_experiment(&cfg).unwrap();
        assert_eq!(r.aggregate.trials, 2);
        assert_eq!(r.aggregate.failed, 2);
        assert_eq!(r.aggregate.success_fraction, 0.0);
        assert!(r.trials.iter().all(|t| !t.success && t.failure.is_some()));
    }

    #[test]
    fn every_protocol_runs() {
        let protocols = [
            ProtocolConfig::Nomem { ensemble: EnsembleChoice::Covering },
            ProtocolConfig::Nomem { ensemble: EnsembleChoice::Bracket },
            ProtocolConfig::Clifford,
            ProtocolConfig::Bell,
            ProtocolConfig::Twocopy { sigma: None },
            ProtocolConfig::Kmem { k: 1, sign: true },
            ProtocolConfig::Generic { povm: GenericPovm::Covering },
            ProtocolConfig::Generic { povm: GenericPovm::Bell },
            ProtocolConfig::Purity { k: 1, mode: PurityMode::Trajectory },
        ];
        for p in protocols {
            let mut cfg = ExperimentConfig::new(p.clone(), 1, "haar", 0.3);
            cfg.budget.rounds = Some(200);
            let r = run_experiment(&cfg).unwrap();
            assert_eq!(r.aggregate.failed, 0, "{p:?}: {:?}", r.trials[0].failure);
            assert!(r.trials[0].copies > 0, "{p:?}");
        }
    }

    #[test]
    fn purity_verdicts_scored_against_truth() {
        let mut cfg = ExperimentConfig::new(ProtocolConfig::Purity { k: 2, mode: PurityMode::Bernoulli }, 2, "ghz", 0.1);
        cfg.seeds = (0..10).collect();
        let r = run_experiment(&cfg).unwrap();
        assert_eq!(r.aggregate.success_fraction, 1.0);
        assert_eq!(r.rounds, 10);
    }
}
