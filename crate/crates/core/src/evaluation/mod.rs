//! The experiment protocol: leave-one-out scoring over seeded runs, the
//! target-only baseline, and the end-to-end selection driver.

mod protocol;
mod report;
mod seeds;
mod stats;
mod task;
mod trainer;

pub use protocol::{loocv_score, multi_run_median};
pub use report::{parse_json_report, render_report, ReportFormat, CSV_HEADER};
pub use seeds::{derive_seed, fold_seed, RunSeeds};
pub use stats::RunStats;
pub use task::{run_loaded, run_task, unit_scale, DatasetRef, EvalReport, Method, Mode, SubsetResult, TaskSpec};
pub use trainer::{FtAnnTrainer, IdtrTrainer, MsAnnTrainer, Trainer};

use crate::data::LabeledDataset;
use crate::error::Result;

/// Target-only error of `method`'s learner family under the standard protocol.
pub fn baseline_error(target: &LabeledDataset, trainer: &dyn Trainer, n_runs: usize, seeds: &RunSeeds) -> Result<f64> {
    Ok(multi_run_median(trainer, &[], target, n_runs, seeds)?.median)
}
