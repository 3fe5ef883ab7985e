//! A full experiment from a JSON config, then a sweep over the round budget
//! written as CSV.

use pauliest::harness::{report_render, run_experiment, sweep, ExperimentConfig, SweepAxis};

const CONFIG: &str = r#"{
  "protocol": {"kind": "clifford"},
  "n": 2,
  "state": "haar",
  "paulis": "list:XX,YY,ZZ,XZ",
  "eps": 0.1,
  "seeds": [1, 2, 3, 4, 5, 6, 7, 8]
}"#;

fn main() -> pauliest::Result<()> {
    let cfg = ExperimentConfig::from_json(CONFIG)?;
    let result = run_experiment(&cfg)?;
    print!("{}", report_render(&result));
    let table = sweep(&cfg, SweepAxis::Rounds, &[50.0, 200.0, 800.0, 3200.0])?;
    print!("{}", table.to_csv()?);
    Ok(())
}
