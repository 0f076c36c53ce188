//! Fine-tuning: pretrain on the source, copy every weight, continue on the target.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::models::mlp::{MlpParams, MlpSpec, DEFAULT_LR};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FineTuneConfig {
    pub epoch_s: usize,
    pub epoch_t: usize,
    pub lr: f64,
}

impl Default for FineTuneConfig {
    fn default() -> Self {
        Self { epoch_s: 100, epoch_t: 50, lr: DEFAULT_LR }
    }
}

impl FineTuneConfig {
    /// Epoch budget of a network trained on the target alone.
    pub fn baseline_epochs(&self) -> usize {
        self.epoch_s + self.epoch_t
    }
}

/// Weights come from stream 0 of the seed (via [`MlpParams::init`]); dropout
/// masks come from stream 1.
fn dropout_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

pub fn fit_ftann(source: &LabeledDataset, target: &LabeledDataset, cfg: &FineTuneConfig, seed: u64) -> Result<MlpParams> {
    if source.n_in() != target.n_in() || source.n_out() != target.n_out() {
        return Err(Error::DimensionMismatch);
    }
    let spec = MlpSpec::new(source.n_in(), source.n_out());
    let mut rng = dropout_rng(seed);
    let mut model = MlpParams::init(spec, seed);
    model.train(source, cfg.epoch_s, cfg.lr, &mut rng)?;
    let mut tuned = model.with_fresh_optimizer();
    tuned.train(target, cfg.epoch_t, cfg.lr, &mut rng)?;
    Ok(tuned)
}

/// A network trained from scratch on `data` only.
pub fn fit_mlp(data: &LabeledDataset, epochs: usize, lr: f64, seed: u64) -> Result<MlpParams> {
    let mut rng = dropout_rng(seed);
    let mut model = MlpParams::init(MlpSpec::new(data.n_in(), data.n_out()), seed);
    model.train(data, epochs, lr, &mut rng)?;
    Ok(model)
}
