//! Multi-source network: one shared layer, then a feature extractor and a
//! regressor per source domain. Predictions average the branches.

use rand::seq::index::sample;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::losses::{coral_with_grad, mmd_with_grad, regressor_distance_with_grad, Bandwidth, BetaSchedule};
use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::models::mlp::{DEFAULT_DROPOUT, DEFAULT_LR};
use crate::models::nn::{self, Activation, Adam, Layer};
use crate::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MsAnnConfig {
    pub epoch_max: usize,
    pub lr: f64,
    /// Weight of CORAL inside the discrepancy term.
    pub lambda_coral: f64,
    pub gamma: f64,
    pub mu: f64,
    pub schedule: BetaSchedule,
    pub bandwidth: Bandwidth,
    pub dropout: f64,
}

impl Default for MsAnnConfig {
    fn default() -> Self {
        Self {
            epoch_max: 150,
            lr: DEFAULT_LR,
            lambda_coral: 5000.0,
            gamma: 1.0,
            mu: 10.0,
            schedule: BetaSchedule::Decay,
            bandwidth: Bandwidth::Median,
            dropout: DEFAULT_DROPOUT,
        }
    }
}

impl MsAnnConfig {
    pub fn validate(&self) -> Result<()> {
        let coefs = [self.lr, self.lambda_coral, self.gamma, self.mu, self.dropout];
        if coefs.iter().any(|c| !(c.is_finite() && *c >= 0.0)) || self.dropout >= 1.0 {
            return Err(Error::Config("multi-source coefficients must be finite and nonnegative".into()));
        }
        if matches!(self.bandwidth, Bandwidth::Fixed(h) if !(h > 0.0 && h.is_finite())) {
            return Err(Error::Config("kernel bandwidth must be positive".into()));
        }
        Ok(())
    }
}

/// `(2 + 12N) n² + (2 + 5N + 2 n_out N) n + n_out N`.
pub fn msann_param_count(n_in: usize, n_out: usize, n_sources: usize) -> usize {
    let (n, m, k) = (n_in, n_out, n_sources);
    (2 + 12 * k) * n * n + (2 + 5 * k + 2 * m * k) * n + m * k
}

#[derive(Debug, Clone, PartialEq)]
struct Branch {
    extractor: Vec<Layer>,
    regressor: Vec<Layer>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MsAnnModel {
    n_in: usize,
    n_out: usize,
    common: Vec<Layer>,
    branches: Vec<Branch>,
    params: Vec<f64>,
    adam: Adam,
    steps: usize,
    config: MsAnnConfig,
}

/// Loss components of one training step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossParts {
    pub error: f64,
    pub discrepancy: f64,
    pub agreement: f64,
    pub total: f64,
}

impl MsAnnModel {
    pub fn init(n_in: usize, n_out: usize, n_sources: usize, config: MsAnnConfig, seed: u64) -> Self {
        let (h1, h2, h3) = (2 * n_in, 3 * n_in, 2 * n_in);
        let (common, mut offset) = nn::layout(&[n_in, h1], &[Activation::Relu], &[0.0], 0);
        let mut branches = Vec::with_capacity(n_sources);
        for _ in 0..n_sources {
            let (extractor, end) =
                nn::layout(&[h1, h2, h3], &[Activation::Relu, Activation::Relu], &[config.dropout, 0.0], offset);
            let (regressor, end) = nn::layout(&[h3, n_out], &[Activation::Identity], &[0.0], end);
            offset = end;
            branches.push(Branch { extractor, regressor });
        }
        let mut params = vec![0.0; offset];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let all = common.iter().chain(branches.iter().flat_map(|b| b.extractor.iter().chain(&b.regressor)));
        for layer in all {
            layer.dense.init(&mut params, &mut rng);
        }
        let adam = Adam::new(offset, config.lr);
        Self { n_in, n_out, common, branches, params, adam, steps: 0, config }
    }

    pub fn n_sources(&self) -> usize {
        self.branches.len()
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Optimizer updates applied so far.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn config(&self) -> &MsAnnConfig {
        &self.config
    }

    /// Output of each branch on `x`, dropout off.
    pub fn branch_outputs(&self, x: &Matrix) -> Result<Vec<Matrix>> {
        if x.ncols() != self.n_in {
            return Err(Error::ShapeMismatch(format!("expected {} inputs, got {}", self.n_in, x.ncols())));
        }
        let (h, _) = nn::forward(&self.params, &self.common, x, None);
        Ok(self
            .branches
            .iter()
            .map(|b| {
                let (f, _) = nn::forward(&self.params, &b.extractor, &h, None);
                nn::forward(&self.params, &b.regressor, &f, None).0
            })
            .collect())
    }

    /// Loss and parameter gradient for one step on domain `i`, given already
    /// sampled batches. Dropout is applied only when `rng` is given.
    #[allow(clippy::too_many_arguments)]
    pub fn loss_and_grad(
        &self,
        i: usize,
        xs: &Matrix,
        ys: &Matrix,
        xt: &Matrix,
        step: usize,
        step_max: usize,
        mut rng: Option<&mut (dyn RngCore + '_)>,
    ) -> Result<(LossParts, Vec<f64>)> {
        let p = &self.params;
        let w = &self.config;
        let beta = w.schedule.at(step, step_max);
        let (hs, tape_hs) = nn::forward(p, &self.common, xs, None);
        let (ht, tape_ht) = nn::forward(p, &self.common, xt, None);

        let branch = &self.branches[i];
        let (fs, tape_fs) = nn::forward(p, &branch.extractor, &hs, rng.as_deref_mut());
        let (ps, tape_ps) = nn::forward(p, &branch.regressor, &fs, None);

        let mut target_feats = Vec::with_capacity(self.branches.len());
        let mut target_outs = Vec::with_capacity(self.branches.len());
        for b in &self.branches {
            let (ft, tape_ft) = nn::forward(p, &b.extractor, &ht, rng.as_deref_mut());
            let (pt, tape_pt) = nn::forward(p, &b.regressor, &ft, None);
            target_feats.push((ft, tape_ft, tape_pt));
            target_outs.push(pt);
        }

        let (l_error, d_ps) = nn::mse_with_grad(&ps, ys);
        let ft_i = &target_feats[i].0;
        let (l_mmd, dmmd_s, dmmd_t) = mmd_with_grad(&fs, ft_i, self.config.bandwidth)?;
        let (l_coral, dcoral_s, dcoral_t) = coral_with_grad(&fs, ft_i)?;
        let l_dis = l_mmd + w.lambda_coral * l_coral;
        let (l_reg, d_reg) = if self.branches.len() >= 2 {
            regressor_distance_with_grad(&target_outs)?
        } else {
            (0.0, vec![Matrix::zeros(xt.nrows(), self.n_out); self.branches.len()])
        };
        let total = l_error + w.gamma * beta * l_dis + w.mu * beta * l_reg;
        if !total.is_finite() {
            return Err(Error::NonFiniteLoss);
        }

        let mut grad = vec![0.0; p.len()];
        let dis_scale = w.gamma * beta;
        let mut d_fs = nn::backward(p, &branch.regressor, &tape_ps, &d_ps, &mut grad);
        d_fs += (dmmd_s + dcoral_s * w.lambda_coral) * dis_scale;
        let d_hs = nn::backward(p, &branch.extractor, &tape_fs, &d_fs, &mut grad);
        nn::backward(p, &self.common, &tape_hs, &d_hs, &mut grad);

        let mut d_ht = Matrix::zeros(ht.nrows(), ht.ncols());
        let mut d_target_feat_i = Some((dmmd_t + dcoral_t * w.lambda_coral) * dis_scale);
        for (j, (b, (_, tape_ft, tape_pt))) in self.branches.iter().zip(&target_feats).enumerate() {
            let d_pt = &d_reg[j] * (w.mu * beta);
            let mut d_ft = nn::backward(p, &b.regressor, tape_pt, &d_pt, &mut grad);
            if j == i {
                d_ft += d_target_feat_i.take().expect("added once");
            }
            d_ht += nn::backward(p, &b.extractor, tape_ft, &d_ft, &mut grad);
        }
        nn::backward(p, &self.common, &tape_ht, &d_ht, &mut grad);

        let parts = LossParts { error: l_error, discrepancy: l_dis, agreement: l_reg, total };
        Ok((parts, grad))
    }

    pub fn predict(&self, x: &Matrix) -> Result<Matrix> {
        let outs = self.branch_outputs(x)?;
        let n = outs.len() as f64;
        let mut sum = Matrix::zeros(x.nrows(), self.n_out);
        for o in outs {
            sum += o;
        }
        Ok(sum / n)
    }
}

pub fn msann_predict(model: &MsAnnModel, x: &Matrix) -> Result<Matrix> {
    model.predict(x)
}

/// Per epoch, one Adam update per source domain on batches of
/// `min(|source_i|, |target|)` rows drawn without replacement.
/// Target labels are never read.
pub fn fit_msann(sources: &[LabeledDataset], target: &LabeledDataset, cfg: &MsAnnConfig, seed: u64) -> Result<MsAnnModel> {
    fit_msann_until(sources, target, cfg, seed, cfg.epoch_max)
}

/// Same trajectory as [`fit_msann`], stopped after `epochs` epochs (capped at
/// `epoch_max`). The step schedule still spans the full `epoch_max`.
pub fn fit_msann_until(
    sources: &[LabeledDataset],
    target: &LabeledDataset,
    cfg: &MsAnnConfig,
    seed: u64,
    epochs: usize,
) -> Result<MsAnnModel> {
    cfg.validate()?;
    if sources.is_empty() {
        return Err(Error::Config("multi-source training needs at least one source domain".into()));
    }
    let (n_in, n_out) = (target.n_in(), target.n_out());
    if sources.iter().any(|s| s.n_in() != n_in || s.n_out() != n_out) {
        return Err(Error::DimensionMismatch);
    }
    let mut model = MsAnnModel::init(n_in, n_out, sources.len(), *cfg, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let step_max = sources.len() * cfg.epoch_max;
    let mut step = 1;
    for _ in 0..epochs.min(cfg.epoch_max) {
        for (i, source) in sources.iter().enumerate() {
            let nb = source.n_rows().min(target.n_rows());
            let rows_s = sample(&mut rng, source.n_rows(), nb).into_vec();
            let rows_t = sample(&mut rng, target.n_rows(), nb).into_vec();
            let xs = source.inputs().select_rows(&rows_s);
            let ys = source.outputs().select_rows(&rows_s);
            let xt = target.inputs().select_rows(&rows_t);
            let (_, grad) = model.loss_and_grad(i, &xs, &ys, &xt, step, step_max, Some(&mut rng))?;
            if grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::NonFiniteLoss);
            }
            model.adam.step(&mut model.params, &grad);
            model.steps += 1;
            step += 1;
        }
    }
    Ok(model)
}
