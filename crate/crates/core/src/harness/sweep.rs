use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ProtocolConfig};
use super::run::run_experiment;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    /// Round budget, written to `budget.rounds`.
    #[serde(rename = "T")]
    Rounds,
    #[serde(rename = "eps")]
    Eps,
    #[serde(rename = "k")]
    K,
    #[serde(rename = "n")]
    N,
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "T" | "rounds" => SweepAxis::Rounds,
            "eps" => SweepAxis::Eps,
            "k" => SweepAxis::K,
            "n" => SweepAxis::N,
            other => return Err(Error::Config(format!("invalid sweep axis {other:?}; expected T, eps, k or n"))),
        })
    }
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Rounds => "T",
            SweepAxis::Eps => "eps",
            SweepAxis::K => "k",
            SweepAxis::N => "n",
        }
    }
}

/// One CSV line per swept value. Columns, in order: `axis, value, protocol,
/// n, k, eps, rounds, trials, failed, success_fraction, median_max_error,
/// max_error, mean_copies, reference`. `reference` is the purity scaling
/// `min(2^{n-k}, 2^{n/2})` and empty for the other protocols.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: String,
    pub value: f64,
    pub protocol: String,
    pub n: usize,
    pub k: Option<usize>,
    pub eps: f64,
    pub rounds: u64,
    pub trials: usize,
    pub failed: usize,
    pub success_fraction: f64,
    pub median_max_error: Option<f64>,
    pub max_error: Option<f64>,
    pub mean_copies: f64,
    pub reference: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(HEADER)?;
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let rows = r.deserialize().collect::<std::result::Result<Vec<SweepRow>, _>>()?;
        Ok(SweepTable { rows })
    }
}

const HEADER: [&str; 14] = [
    "axis",
    "value",
    "protocol",
    "n",
    "k",
    "eps",
    "rounds",
    "trials",
    "failed",
    "success_fraction",
    "median_max_error",
    "max_error",
    "mean_copies",
    "reference",
];

fn as_count(axis: SweepAxis, v: f64) -> Result<usize> {
    if v < 0.0 || v.fract() != 0.0 {
        return Err(Error::Config(format!("{} values must be non-negative integers, got {v}", axis.name())));
    }
    Ok(v as usize)
}

/// Run the config once per value, with the chosen parameter replaced.
/// Nothing is written to disk; per-value results are summarised as rows.
pub fn sweep(config: &ExperimentConfig, axis: SweepAxis, values: &[f64]) -> Result<SweepTable> {
    let mut rows = Vec::with_capacity(values.len());
    for &v in values {
        let mut cfg = config.clone();
        cfg.output.dir = None;
        match axis {
            SweepAxis::Rounds => {
                if matches!(cfg.protocol, ProtocolConfig::Purity { .. }) {
                    return Err(Error::Config("purity repetitions are fixed; sweep k or n instead".into()));
                }
                cfg.budget.rounds = Some(as_count(axis, v)? as u64);
            }
            SweepAxis::Eps => cfg.eps = v,
            SweepAxis::K => cfg.protocol.set_k(as_count(axis, v)?)?,
            SweepAxis::N => cfg.n = as_count(axis, v)?,
        }
        let res = run_experiment(&cfg)?;
        let k = cfg.protocol.k();
        let reference = match (&cfg.protocol, k) {
            (ProtocolConfig::Purity { .. }, Some(k)) => {
                Some(2f64.powi((cfg.n - k) as i32).min(2f64.powf(cfg.n as f64 / 2.0)))
            }
            _ => None,
        };
        rows.push(SweepRow {
            axis: axis.name().into(),
            value: v,
            protocol: cfg.protocol.id().into(),
            n: cfg.n,
            k,
            eps: cfg.eps,
            rounds: res.rounds,
            trials: res.aggregate.trials,
            failed: res.aggregate.failed,
            success_fraction: res.aggregate.success_fraction,
            median_max_error: res.aggregate.median_max_error,
            max_error: res.aggregate.max_error,
            mean_copies: res.aggregate.mean_copies,
            reference,
        });
    }
    Ok(SweepTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::PurityMode;

    #[test]
    fn empty_values_give_empty_table() {
        let cfg = ExperimentConfig::new(ProtocolConfig::Bell, 1, "haar", 0.3);
        let t = sweep(&cfg, SweepAxis::Eps, &[]).unwrap();
        assert!(t.rows.is_empty());
        let csv = t.to_csv().unwrap();
        assert_eq!(csv.trim(), HEADER.join(","));
        assert!(SweepTable::from_csv(&csv).unwrap().rows.is_empty());
    }

    #[test]
    fn csv_round_trip() {
        let mut cfg = ExperimentConfig::new(ProtocolConfig::Purity { k: 0, mode: PurityMode::Bernoulli }, 3, "mixed", 0.3);
        cfg.seeds = vec![1, 2, 3];
        let t = sweep(&cfg, SweepAxis::K, &[0.0, 1.0, 2.0, 3.0]).unwrap();
        let back = SweepTable::from_csv(&t.to_csv().unwrap()).unwrap();
        assert_eq!(back, t);
        assert!(t.rows.iter().all(|r| r.max_error.is_none() && r.reference.is_some()));
    }

    #[test]
    fn invalid_axis_and_values() {
        assert!("q".parse::<SweepAxis>().is_err());
        let cfg = ExperimentConfig::new(ProtocolConfig::Clifford, 1, "haar", 0.3);
        assert!(sweep(&cfg, SweepAxis::K, &[1.0]).is_err());
        assert!(sweep(&cfg, SweepAxis::Rounds, &[2.5]).is_err());
    }

    #[test]
    fn error_medians_fall_with_rounds() {
        let mut cfg = ExperimentConfig::new(ProtocolConfig::Clifford, 2, "haar", 0.2);
        cfg.seeds = (0..30).collect();
        let t = sweep(&cfg, SweepAxis::Rounds, &[100.0, 400.0, 1600.0]).unwrap();
        let med: Vec<f64> = t.rows.iter().map(|r| r.median_max_error.unwrap()).collect();
        assert!(med[0] > med[1] && med[1] > med[2], "{med:?}");
        // sixteen times the rounds, a quarter of the error
        assert!(med[2] < 0.5 * med[0], "{med:?}");
    }

    #[test]
    fn purity_sweep_shape() {
        let mut cfg = ExperimentConfig::new(ProtocolConfig::Purity { k: 0, mode: PurityMode::Bernoulli }, 6, "mixed", 0.3);
        cfg.seeds = (0..200).collect();
        let t = sweep(&cfg, SweepAxis::K, &(0..=6).map(f64::from).collect::<Vec<_>>()).unwrap();
        let reference: Vec<f64> = t.rows.iter().map(|r| r.reference.unwrap()).collect();
        assert_eq!(reference, vec![8.0, 8.0, 8.0, 8.0, 4.0, 2.0, 1.0]);
        let copies: Vec<f64> = t.rows.iter().map(|r| r.mean_copies).collect();
        assert_eq!(copies, vec![1280.0, 640.0, 320.0, 160.0, 80.0, 40.0, 20.0]);
        // no memory: the event never fires, so mixed is never detected
        assert_eq!(t.rows[0].success_fraction, 0.0);
        for r in &t.rows[1..] {
            assert!(r.success_fraction > 0.9, "{r:?}");
        }
    }
}
