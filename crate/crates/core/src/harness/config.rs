use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{check_cap, PauliSet};
use crate::protocols::{PurityMode, SigmaMode};
use crate::quantum::StateSpec;

/// Which ensemble the memory-free protocol measures with.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleChoice {
    /// Eigenstates of every group in the stabilizer covering.
    #[default]
    Covering,
    /// The witness mixture of a `delta_A` bracket.
    Bracket,
}

/// POVM family for the generic `(c, M)` estimator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenericPovm {
    /// Two-copy Bell measurement, `c = 2`.
    #[default]
    Bell,
    /// Uniformly chosen covering family, `c = 1`.
    Covering,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProtocolConfig {
    Nomem {
        #[serde(default)]
        ensemble: EnsembleChoice,
    },
    Clifford,
    Bell,
    Twocopy {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sigma: Option<SigmaMode>,
    },
    Kmem {
        k: usize,
        #[serde(default = "yes")]
        sign: bool,
    },
    Generic {
        #[serde(default)]
        povm: GenericPovm,
    },
    Purity {
        k: usize,
        #[serde(default)]
        mode: PurityMode,
    },
}

fn yes() -> bool {
    true
}

impl ProtocolConfig {
    pub fn id(&self) -> &'static str {
        match self {
            ProtocolConfig::Nomem { .. } => "nomem",
            ProtocolConfig::Clifford => "clifford",
            ProtocolConfig::Bell => "bell",
            ProtocolConfig::Twocopy { .. } => "twocopy",
            ProtocolConfig::Kmem { .. } => "kmem",
            ProtocolConfig::Generic { .. } => "generic",
            ProtocolConfig::Purity { .. } => "purity",
        }
    }

    pub fn k(&self) -> Option<usize> {
        match self {
            ProtocolConfig::Kmem { k, .. } | ProtocolConfig::Purity { k, .. } => Some(*k),
            _ => None,
        }
    }

    pub(crate) fn set_k(&mut self, value: usize) -> Result<()> {
        match self {
            ProtocolConfig::Kmem { k, .. } | ProtocolConfig::Purity { k, .. } => {
                *k = value;
                Ok(())
            }
            _ => Err(Error::Config(format!("protocol {} has no memory parameter k", self.id()))),
        }
    }

    /// Default protocol for a CLI `--protocol` name.
    pub fn from_id(id: &str, k: Option<usize>) -> Result<Self> {
        let need_k = || k.ok_or_else(|| Error::Config(format!("protocol {id} needs --k")));
        Ok(match id {
            "nomem" => ProtocolConfig::Nomem { ensemble: EnsembleChoice::default() },
            "clifford" => ProtocolConfig::Clifford,
            "bell" => ProtocolConfig::Bell,
            "twocopy" => ProtocolConfig::Twocopy { sigma: None },
            "kmem" => ProtocolConfig::Kmem { k: need_k()?, sign: true },
            "generic" => ProtocolConfig::Generic { povm: GenericPovm::default() },
            "purity" => ProtocolConfig::Purity { k: need_k()?, mode: PurityMode::default() },
            other => return Err(Error::Config(format!("unknown protocol {other:?}"))),
        })
    }
}

/// Overrides for the default round budgets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetConfig {
    /// Fixed round count; replaces the formula entirely.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<u64>,
    /// Multiplier applied to the formula.
    #[serde(default = "unit")]
    pub scale: f64,
    /// Advantage used by the memory-free and generic formulas instead of the
    /// value computed from the ensemble.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

fn unit() -> f64 {
    1.0
}

impl Default for BudgetConfig {
    fn default() -> Self {
        BudgetConfig { rounds: None, scale: 1.0, delta: None }
    }
}

impl BudgetConfig {
    pub(crate) fn apply(&self, formula: u64) -> u64 {
        self.rounds.unwrap_or_else(|| (formula as f64 * self.scale).ceil().max(1.0) as u64)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// File stem; `result` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

/// Where the Pauli set comes from: `all`, `nontrivial`, `file:<path>` or
/// `list:<P1>,<P2>,...`.
#[derive(Clone, Debug, PartialEq)]
pub enum PauliSource {
    All,
    Nontrivial,
    File(PathBuf),
    List(Vec<String>),
}

impl std::str::FromStr for PauliSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "all" {
            Ok(PauliSource::All)
        } else if s == "nontrivial" {
            Ok(PauliSource::Nontrivial)
        } else if let Some(path) = s.strip_prefix("file:") {
            Ok(PauliSource::File(path.into()))
        } else if let Some(list) = s.strip_prefix("list:") {
            Ok(PauliSource::List(list.split(',').map(|p| p.trim().to_string()).collect()))
        } else {
            Err(Error::Config(format!("unknown Pauli source {s:?}")))
        }
    }
}

impl PauliSource {
    pub fn load(&self, n: usize) -> Result<PauliSet> {
        match self {
            PauliSource::All => Ok(PauliSet::all(n)),
            PauliSource::Nontrivial => Ok(PauliSet::nontrivial(n)),
            PauliSource::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read Pauli set {}: {e}", path.display())))?;
                PauliSet::parse_text(&text)
            }
            PauliSource::List(items) => PauliSet::parse_text(&items.join("\n")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub protocol: ProtocolConfig,
    pub n: usize,
    /// State generator, e.g. `haar` or `rho_p:XZ:0.1`.
    pub state: String,
    /// Seed for random state generators; the state is shared by all trials.
    #[serde(default)]
    pub state_seed: u64,
    #[serde(default = "nontrivial")]
    pub paulis: String,
    pub eps: f64,
    pub seeds: Vec<u64>,
    /// Trials per seed.
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default)]
    pub budget: BudgetConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default)]
    pub output: OutputConfig,
}

fn nontrivial() -> String {
    "nontrivial".into()
}

fn one() -> usize {
    1
}

impl ExperimentConfig {
    /// Minimal config: the given protocol on `n` qubits, nontrivial strings,
    /// one trial for seed 0.
    pub fn new(protocol: ProtocolConfig, n: usize, state: &str, eps: f64) -> Self {
        ExperimentConfig {
            protocol,
            n,
            state: state.into(),
            state_seed: 0,
            paulis: nontrivial(),
            eps,
            seeds: vec![0],
            trials: 1,
            budget: BudgetConfig::default(),
            threads: None,
            output: OutputConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn state_spec(&self) -> Result<StateSpec> {
        self.state.parse()
    }

    pub fn pauli_source(&self) -> Result<PauliSource> {
        self.paulis.parse()
    }

    /// Every check that can run without doing the experiment.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        check_cap("experiment", self.n).map_err(|e| Error::Config(e.to_string()))?;
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad(format!("eps must lie in (0, 1), got {}", self.eps));
        }
        if self.seeds.is_empty() {
            return bad("seeds must not be empty".into());
        }
        if self.seeds.iter().collect::<HashSet<_>>().len() != self.seeds.len() {
            return bad("seeds must be distinct".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if !(self.budget.scale > 0.0) {
            return bad("budget.scale must be positive".into());
        }
        if self.budget.rounds == Some(0) {
            return bad("budget.rounds must be positive".into());
        }
        if let Some(d) = self.budget.delta {
            if !(d > 0.0) {
                return bad("budget.delta must be positive".into());
            }
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        if let Some(k) = self.protocol.k() {
            if k > self.n {
                return bad(format!("k = {k} exceeds n = {}", self.n));
            }
        }
        let spec = self.state_spec().map_err(|e| Error::Config(e.to_string()))?;
        if let Some(m) = spec.intrinsic_n() {
            if m != self.n {
                return bad(format!("state {} is on {m} qubits, config has n = {}", self.state, self.n));
            }
        }
        let source = self.pauli_source()?;
        if let PauliSource::File(path) = &source {
            if !path.is_file() {
                return bad(format!("Pauli set file {} does not exist", path.display()));
            }
        }
        if !matches!(self.protocol, ProtocolConfig::Purity { .. } | ProtocolConfig::Kmem { .. }) {
            let set = source.load(self.n).map_err(|e| Error::Config(e.to_string()))?;
            if set.n() != self.n {
                return bad(format!("Pauli set is on {} qubits, config has n = {}", set.n(), self.n));
            }
        }
        Ok(())
    }
}
