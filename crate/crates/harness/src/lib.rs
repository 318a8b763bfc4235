//! Benchmark definitions and the batch experiment runner.
//!
//! A [`Benchmark`] names a target, a simulated teacher and a grid of query
//! costs. [`run_experiment`] runs every (cost point, trial) pair as its own
//! learner session on a bounded thread pool and folds the results in trial
//! order, so output files are reproducible byte for byte.

pub mod benchmark;
pub mod error;
pub mod experiment;
pub mod report;

pub use benchmark::{build_target, default_costs, Benchmark, Target, TeacherKind, TeacherSpec};
pub use error::{HarnessError, Result};
pub use experiment::{
    aggregate, aggregate_robust, mean_var, run_experiment, run_robustness, run_trial, Aggregate, Experiment,
    RobustAggregate, RobustRow, Robustness, TrialOutcome, TrialRow,
};
pub use report::{plot_data, read_csv, write_csv, write_experiment, write_robustness, PlotData};

/// Loads a benchmark from a JSON file, or builds the default one for a
/// target name.
pub fn load_benchmark(name_or_path: &str) -> Result<Benchmark> {
    let path = std::path::Path::new(name_or_path);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: name_or_path.to_string(),
            source,
        })?;
        let bench: Benchmark = serde_json::from_str(&text)?;
        bench.validate()?;
        return Ok(bench);
    }
    Benchmark::named(name_or_path)
}
