//! Experiment configuration, the trial runner and result aggregation.

mod config;
mod report;
mod run;

pub use config::{
    default_budgets, DatasetSource, DatasetSpec, ExperimentConfig, Labeling, MethodKind, MethodSpec, SynthSpec,
};
pub use report::{
    aggregate, cluster_coverage, mean_std, read_results, read_results_from, write_rows, write_rows_to, ResultRow,
    SummaryRow, OVERALL,
};
pub use run::{
    evaluate_selection, method_seed, prepare_trial, run_experiment, run_method, sensitivity_sweep, sort_rows,
    trial_seed, Trial,
};

use crate::error::Error;

/// Process exit code for a failed command: 2 for configuration problems,
/// 3 for everything touching data.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::InvalidParameter(_) => 2,
        _ => 3,
    }
}
