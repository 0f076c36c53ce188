use rayon::prelude::*;

use super::{error_score, orthogonal_procrustes};
use crate::error::{Error, Result};
use crate::models::{ElmConfig, ElmHidden, ElmModel};
use crate::{LabeledDataset, Matrix};

/// ELM settings shared by every fit behind one distance table.
pub type ModelDistanceConfig = ElmConfig;

fn check_pair(source: &LabeledDataset, target: &LabeledDataset) -> Result<()> {
    if source.n_in() != target.n_in() || source.n_out() != target.n_out() {
        return Err(Error::ShapeMismatch("source and target widths differ".into()));
    }
    if source.n_rows() < 2 {
        return Err(Error::InvalidDataset("model distances need at least 2 source rows".into()));
    }
    Ok(())
}

fn fit(hidden: &ElmHidden, ds: &LabeledDataset, ridge: f64) -> Result<ElmModel> {
    hidden.fit(ds.inputs(), ds.outputs(), ridge)
}

/// `‖T − I‖_F` for the Procrustes map taking `theta_source` onto `theta_target`.
fn alignment_gap(theta_source: &Matrix, theta_target: &Matrix) -> Result<f64> {
    let t = orthogonal_procrustes(theta_source, theta_target)?;
    let n = t.nrows();
    Ok((t - Matrix::identity(n, n)).norm())
}

/// Every ELM fit needed for the model distances of one source/target pair.
#[derive(Debug, Clone)]
pub struct ModelRefits {
    pub hidden: ElmHidden,
    pub base_source: ElmModel,
    pub base_target: ElmModel,
    /// `leave_one_out[i]` was fitted without source row `i`.
    pub leave_one_out: Vec<ElmModel>,
}

impl ModelRefits {
    /// Runs the `N_s + 2` fits. The leave-one-out fits run in parallel on the
    /// current rayon pool; results do not depend on the pool size.
    pub fn compute(source: &LabeledDataset, target: &LabeledDataset, cfg: &ModelDistanceConfig) -> Result<Self> {
        check_pair(source, target)?;
        let hidden = ElmHidden::draw(source.n_in(), cfg.hidden, cfg.seed);
        let base_source = fit(&hidden, source, cfg.ridge)?;
        let base_target = fit(&hidden, target, cfg.ridge)?;
        let leave_one_out = (0..source.n_rows())
            .into_par_iter()
            .map(|i| fit(&hidden, &source.remove_row(i)?, cfg.ridge))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { hidden, base_source, base_target, leave_one_out })
    }

    pub fn performance(&self, target: &LabeledDataset) -> Result<Vec<f64>> {
        let base = error_score(&self.base_source.predict(target.inputs())?, target.outputs())?;
        self.leave_one_out
            .iter()
            .map(|m| Ok(base - error_score(&m.predict(target.inputs())?, target.outputs())?))
            .collect()
    }

    pub fn feature(&self) -> Result<Vec<f64>> {
        let theta_t = &self.base_target.output_weights;
        let base = alignment_gap(&self.base_source.output_weights, theta_t)?;
        self.leave_one_out
            .iter()
            .map(|m| Ok(base - alignment_gap(&m.output_weights, theta_t)?))
            .collect()
    }
}

/// Change in target error when source row `i` is dropped from the source ELM.
/// Negative values mean the row helps predict the target.
pub fn performance_distance(
    i: usize,
    source: &LabeledDataset,
    target: &LabeledDataset,
    cfg: &ModelDistanceConfig,
) -> Result<f64> {
    check_pair(source, target)?;
    let hidden = ElmHidden::draw(source.n_in(), cfg.hidden, cfg.seed);
    let base = fit(&hidden, source, cfg.ridge)?;
    let without = fit(&hidden, &source.remove_row(i)?, cfg.ridge)?;
    Ok(error_score(&base.predict(target.inputs())?, target.outputs())?
        - error_score(&without.predict(target.inputs())?, target.outputs())?)
}

/// Change in source/target output-layer misalignment when source row `i` is
/// dropped. Negative values mean the row brings the two models closer.
pub fn feature_distance(
    i: usize,
    source: &LabeledDataset,
    target: &LabeledDataset,
    cfg: &ModelDistanceConfig,
) -> Result<f64> {
    check_pair(source, target)?;
    let hidden = ElmHidden::draw(source.n_in(), cfg.hidden, cfg.seed);
    let base_s = fit(&hidden, source, cfg.ridge)?;
    let base_t = fit(&hidden, target, cfg.ridge)?;
    let without = fit(&hidden, &source.remove_row(i)?, cfg.ridge)?;
    Ok(alignment_gap(&base_s.output_weights, &base_t.output_weights)?
        - alignment_gap(&without.output_weights, &base_t.output_weights)?)
}

/// Target error of an ELM trained on the whole source domain.
pub fn base_transferability_score(
    source: &LabeledDataset,
    target: &LabeledDataset,
    cfg: &ModelDistanceConfig,
) -> Result<f64> {
    if source.n_in() != target.n_in() || source.n_out() != target.n_out() {
        return Err(Error::ShapeMismatch("source and target widths differ".into()));
    }
    let hidden = ElmHidden::draw(source.n_in(), cfg.hidden, cfg.seed);
    let model = fit(&hidden, source, cfg.ridge)?;
    error_score(&model.predict(target.inputs())?, target.outputs())
}
