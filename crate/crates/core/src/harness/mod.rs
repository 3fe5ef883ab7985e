//! Experiment configs, parallel runs over seeds, sweeps and write-once output.

mod config;
mod output;
mod report;
mod run;
mod sweep;

pub use config::{BudgetConfig, EnsembleChoice, ExperimentConfig, GenericPovm, OutputConfig, PauliSource, ProtocolConfig};
pub use output::write_once;
pub use report::report_render;
pub use run::{run_experiment, Aggregate, ExperimentResult, TrialDigest};
pub use sweep::{sweep, SweepAxis, SweepRow, SweepTable};
