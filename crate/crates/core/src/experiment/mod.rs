//! Config-driven experiments: repeated trials, sweeps, data generation and
//! budget dry runs.

mod algorithm;
mod config;
mod runner;

pub use algorithm::{complete_theilsen, ols_outcome, AlgorithmSpec};
pub use config::{ExperimentConfig, InputSource, SweepParameter, SweepSpec};
pub use runner::{
    fit_results, ledger_report, load_inputs, planned_ledgers, run_datagen, run_fit, run_sweep,
    standard_error_at, sweep_results, trial_seed, DatasetEntry, FitResults, Inputs, LedgerRecord,
    SweepPoint, TrialRow, SCHEMA_VERSION,
};
