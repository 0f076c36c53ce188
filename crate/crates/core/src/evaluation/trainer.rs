//! A uniform "fit on these domains, predict these rows" interface over the
//! learners evaluated by the protocol.

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::transfer::{fit_ftann, fit_idtr, fit_mlp, fit_msann_until, FineTuneConfig, MsAnnConfig, TwoStageBoostConfig};
use crate::Matrix;

pub trait Trainer: Sync {
    fn name(&self) -> &'static str;

    /// True when the seed has no effect, so one run stands for all of them.
    fn deterministic(&self) -> bool {
        false
    }

    fn fit_predict(&self, sources: &[LabeledDataset], target: &LabeledDataset, query: &Matrix, seed: u64) -> Result<Matrix>;
}

fn single_source(sources: &[LabeledDataset]) -> Result<Option<&LabeledDataset>> {
    match sources {
        [] => Ok(None),
        [s] => Ok(Some(s)),
        _ => Err(Error::Config("this learner takes a single source domain".into())),
    }
}

/// Two-stage boosted trees; without a source it is plain AdaBoost.R2 on the target.
#[derive(Debug, Clone, Copy)]
pub struct IdtrTrainer(pub TwoStageBoostConfig);

impl Trainer for IdtrTrainer {
    fn name(&self) -> &'static str {
        "idtr"
    }

    fn deterministic(&self) -> bool {
        true
    }

    fn fit_predict(&self, sources: &[LabeledDataset], target: &LabeledDataset, query: &Matrix, _seed: u64) -> Result<Matrix> {
        let model = fit_idtr(single_source(sources)?, target, &self.0)?;
        let pred = model.predict(query)?;
        Ok(Matrix::from_vec(pred.len(), 1, pred))
    }
}

/// Fine-tuned MLP; without a source it trains from scratch for the full budget.
#[derive(Debug, Clone, Copy)]
pub struct FtAnnTrainer(pub FineTuneConfig);

impl Trainer for FtAnnTrainer {
    fn name(&self) -> &'static str {
        "ftann"
    }

    fn fit_predict(&self, sources: &[LabeledDataset], target: &LabeledDataset, query: &Matrix, seed: u64) -> Result<Matrix> {
        let model = match single_source(sources)? {
            Some(s) => fit_ftann(s, target, &self.0, seed)?,
            None => fit_mlp(target, self.0.baseline_epochs(), self.0.lr, seed)?,
        };
        model.predict(query)
    }
}

/// Multi-source network, optionally stopped early at `epochs`.
#[derive(Debug, Clone, Copy)]
pub struct MsAnnTrainer {
    pub config: MsAnnConfig,
    pub epochs: usize,
}

impl MsAnnTrainer {
    pub fn new(config: MsAnnConfig) -> Self {
        Self { config, epochs: config.epoch_max }
    }
}

impl Trainer for MsAnnTrainer {
    fn name(&self) -> &'static str {
        "msann"
    }

    fn fit_predict(&self, sources: &[LabeledDataset], target: &LabeledDataset, query: &Matrix, seed: u64) -> Result<Matrix> {
        fit_msann_until(sources, target, &self.config, seed, self.epochs)?.predict(query)
    }
}
