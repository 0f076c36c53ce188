//! Leave-one-out scoring repeated over independently seeded runs.

use rayon::prelude::*;

use super::seeds::{fold_seed, RunSeeds};
use super::stats::RunStats;
use super::trainer::Trainer;
use crate::data::LabeledDataset;
use crate::error::{Error, Result};

/// Mean over target rows of the RMSE on the held-out row, each fold trained on
/// the sources plus the remaining target rows.
pub fn loocv_score(trainer: &dyn Trainer, sources: &[LabeledDataset], target: &LabeledDataset, seed: u64) -> Result<f64> {
    let n = target.n_rows();
    if n < 2 {
        return Err(Error::TargetTooSmall(n));
    }
    let folds = (0..n)
        .into_par_iter()
        .map(|j| {
            let train = target.remove_row(j)?;
            let held = target.select_rows(&[j])?;
            let pred = trainer.fit_predict(sources, &train, held.inputs(), fold_seed(seed, j))?;
            if pred.shape() != held.outputs().shape() {
                return Err(Error::ShapeMismatch(format!("{} returned {:?}", trainer.name(), pred.shape())));
            }
            let mse = (pred - held.outputs()).norm_squared() / held.n_out() as f64;
            Ok(mse.sqrt())
        })
        .collect::<Result<Vec<f64>>>()?;
    let score = folds.iter().sum::<f64>() / n as f64;
    if !score.is_finite() {
        return Err(Error::NonFinite("cross-validation score"));
    }
    Ok(score)
}

/// Scores `n_runs` seeded runs. Runs execute in parallel but are collected in
/// run order, so the result does not depend on the worker count.
pub fn multi_run_median(
    trainer: &dyn Trainer,
    sources: &[LabeledDataset],
    target: &LabeledDataset,
    n_runs: usize,
    seeds: &RunSeeds,
) -> Result<RunStats> {
    if n_runs == 0 {
        return Err(Error::Config("at least one run is required".into()));
    }
    let values = if trainer.deterministic() {
        vec![loocv_score(trainer, sources, target, seeds.run(0))?; n_runs]
    } else {
        (0..n_runs)
            .into_par_iter()
            .map(|r| loocv_score(trainer, sources, target, seeds.run(r)))
            .collect::<Result<Vec<_>>>()?
    };
    Ok(RunStats::from_values(values))
}
