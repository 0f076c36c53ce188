//! Per-source-row distances to the target domain.
//!
//! Spatial distances work on concatenated `[x, y]` rows. Model distances
//! compare ELM fits with and without a given source row; every fit in one
//! table shares the same frozen hidden layer so only the data change shows.

mod model;
mod procrustes;
mod spatial;
mod table;

pub use model::{
    base_transferability_score, feature_distance, performance_distance, ModelDistanceConfig, ModelRefits,
};
pub use procrustes::{orthogonal_procrustes, procrustes_objective};
pub use spatial::{cosine_distance, euclidean_distance};
pub use table::{compute_distance_table, normalize_column, DistanceTable, Metric};

use crate::error::{Error, Result};
use crate::Matrix;

/// `0.5 · RMSE + 0.5 · max |residual|`, residuals pooled over all outputs.
pub fn error_score(predicted: &Matrix, actual: &Matrix) -> Result<f64> {
    if predicted.shape() != actual.shape() {
        return Err(Error::ShapeMismatch(format!(
            "predictions {:?} vs actual {:?}",
            predicted.shape(),
            actual.shape()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::EmptyData);
    }
    let residuals = predicted - actual;
    let rmse = (residuals.norm_squared() / residuals.len() as f64).sqrt();
    Ok(0.5 * rmse + 0.5 * residuals.amax())
}
