//! The three-hidden-layer regression MLP (`2n → 3n → 2n` hidden units for
//! `n` inputs) trained full-batch with Adam.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::nn::{self, Activation, Adam, Layer};
use crate::error::{Error, Result};
use crate::{LabeledDataset, Matrix};

pub const DEFAULT_DROPOUT: f64 = 0.05;
pub const DEFAULT_LR: f64 = 0.005;

/// Number of trainable scalars in the MLP for the given widths.
pub fn mlp_param_count(n_in: usize, n_out: usize) -> usize {
    14 * n_in * n_in + (7 + 2 * n_out) * n_in + n_out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub n_in: usize,
    pub n_out: usize,
    /// Applied after the second hidden layer during training.
    pub dropout: f64,
}

impl MlpSpec {
    pub fn new(n_in: usize, n_out: usize) -> Self {
        Self { n_in, n_out, dropout: DEFAULT_DROPOUT }
    }

    pub fn hidden_sizes(&self) -> [usize; 3] {
        [2 * self.n_in, 3 * self.n_in, 2 * self.n_in]
    }

    fn layers(&self) -> (Vec<Layer>, usize) {
        let [h1, h2, h3] = self.hidden_sizes();
        nn::layout(
            &[self.n_in, h1, h2, h3, self.n_out],
            &[Activation::Relu, Activation::Relu, Activation::Relu, Activation::Identity],
            &[0.0, self.dropout, 0.0, 0.0],
            0,
        )
    }
}

/// Weights of the four affine maps plus the optimizer state.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    spec: MlpSpec,
    layers: Vec<Layer>,
    params: Vec<f64>,
    adam: Adam,
}

impl MlpParams {
    /// Fan-in scaled uniform initialization, deterministic per seed.
    pub fn init(spec: MlpSpec, seed: u64) -> Self {
        let (layers, n) = spec.layers();
        let mut params = vec![0.0; n];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for layer in &layers {
            layer.dense.init(&mut params, &mut rng);
        }
        Self { spec, layers, params, adam: Adam::new(n, DEFAULT_LR) }
    }

    pub fn spec(&self) -> &MlpSpec {
        &self.spec
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    pub fn adam(&self) -> &Adam {
        &self.adam
    }

    /// Same weights with zeroed optimizer moments.
    pub fn with_fresh_optimizer(&self) -> Self {
        Self { adam: Adam::new(self.params.len(), self.adam.lr), ..self.clone() }
    }

    fn check_width(&self, x: &Matrix) -> Result<()> {
        if x.ncols() != self.spec.n_in {
            return Err(Error::ShapeMismatch(format!("MLP expects {} inputs, got {}", self.spec.n_in, x.ncols())));
        }
        Ok(())
    }

    /// Inference pass: dropout disabled, deterministic.
    pub fn predict(&self, x: &Matrix) -> Result<Matrix> {
        self.check_width(x)?;
        Ok(nn::forward(&self.params, &self.layers, x, None).0)
    }

    /// Training pass with a dropout mask drawn from `rng`.
    pub fn forward_train(&self, x: &Matrix, rng: &mut dyn RngCore) -> Result<Matrix> {
        self.check_width(x)?;
        Ok(nn::forward(&self.params, &self.layers, x, Some(rng)).0)
    }

    /// MSE and its gradient; dropout is sampled only when `rng` is given.
    pub fn loss_and_grad(&self, x: &Matrix, y: &Matrix, rng: Option<&mut dyn RngCore>) -> Result<(f64, Vec<f64>)> {
        self.check_width(x)?;
        if y.ncols() != self.spec.n_out || y.nrows() != x.nrows() {
            return Err(Error::ShapeMismatch("MLP targets".into()));
        }
        let (pred, tape) = nn::forward(&self.params, &self.layers, x, rng);
        let (loss, d_pred) = nn::mse_with_grad(&pred, y);
        let mut grad = vec![0.0; self.params.len()];
        nn::backward(&self.params, &self.layers, &tape, &d_pred, &mut grad);
        Ok((loss, grad))
    }

    /// Full-batch Adam: one update per epoch on all rows of `data`.
    pub fn train(&mut self, data: &LabeledDataset, epochs: usize, lr: f64, rng: &mut dyn RngCore) -> Result<()> {
        self.adam.lr = lr;
        for _ in 0..epochs {
            let (loss, grad) = self.loss_and_grad(data.inputs(), data.outputs(), Some(&mut *rng))?;
            if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::NonFiniteLoss);
            }
            self.adam.step(&mut self.params, &grad);
            if self.params.iter().any(|p| !p.is_finite()) {
                return Err(Error::NonFiniteLoss);
            }
        }
        Ok(())
    }
}

/// Value-style wrapper over [`MlpParams::train`].
pub fn mlp_train(
    mut params: MlpParams,
    data: &LabeledDataset,
    epochs: usize,
    lr: f64,
    rng: &mut dyn RngCore,
) -> Result<MlpParams> {
    params.train(data, epochs, lr, rng)?;
    Ok(params)
}
