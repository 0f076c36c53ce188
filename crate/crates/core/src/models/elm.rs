//! Extreme learning machine: frozen random `tanh` hidden layer, ridge-solved
//! linear output layer.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ElmConfig {
    pub hidden: usize,
    pub ridge: f64,
    pub seed: u64,
}

impl Default for ElmConfig {
    fn default() -> Self {
        Self { hidden: 20, ridge: 1e-6, seed: 0 }
    }
}

/// The random hidden map `h(x) = tanh(W x + b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElmHidden {
    /// `H × n_in`.
    pub weights: Matrix,
    pub bias: DVector<f64>,
}

impl ElmHidden {
    /// Draws `W` and `b` uniformly from (−1, 1).
    pub fn draw(n_in: usize, hidden: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights = Matrix::from_fn(hidden, n_in, |_, _| rng.random_range(-1.0..1.0));
        let bias = DVector::from_fn(hidden, |_, _| rng.random_range(-1.0..1.0));
        Self { weights, bias }
    }

    pub fn n_in(&self) -> usize {
        self.weights.ncols()
    }

    pub fn size(&self) -> usize {
        self.weights.nrows()
    }

    /// `N × H` hidden activations.
    pub fn features(&self, x: &Matrix) -> Result<Matrix> {
        if x.ncols() != self.n_in() {
            return Err(Error::ShapeMismatch(format!("ELM expects {} inputs, got {}", self.n_in(), x.ncols())));
        }
        let mut h = x * self.weights.transpose();
        for mut row in h.row_iter_mut() {
            for (v, b) in row.iter_mut().zip(self.bias.iter()) {
                *v = (*v + b).tanh();
            }
        }
        Ok(h)
    }

    /// Solves the ridge problem for the output layer on top of this hidden map.
    pub fn fit(&self, x: &Matrix, y: &Matrix, ridge: f64) -> Result<ElmModel> {
        if x.nrows() != y.nrows() {
            return Err(Error::ShapeMismatch("ELM inputs and targets differ in rows".into()));
        }
        if x.nrows() == 0 {
            return Err(Error::EmptyData);
        }
        if ridge < 0.0 || !ridge.is_finite() {
            return Err(Error::Config(format!("ridge must be >= 0, got {ridge}")));
        }
        let h = self.features(x)?;
        let output_weights = ridge_solve(&h, y, ridge)?;
        Ok(ElmModel { hidden: self.clone(), output_weights, ridge })
    }
}

/// Minimizes `‖H θ − Y‖² + λ‖θ‖²` through the thin SVD of `H`.
///
/// With `λ = 0` this is the minimum-norm least-squares solution, which requires
/// `H` to have full rank `min(N, H)`.
fn ridge_solve(h: &Matrix, y: &Matrix, ridge: f64) -> Result<Matrix> {
    let svd = h.clone().svd(true, true);
    let (u, v_t) = match (&svd.u, &svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::SingularSystem),
    };
    let s = &svd.singular_values;
    let s_max = s.max();
    let tol = h.nrows().max(h.ncols()) as f64 * f64::EPSILON * s_max;
    if ridge == 0.0 && (s_max == 0.0 || s.iter().any(|&v| v <= tol)) {
        return Err(Error::SingularSystem);
    }
    let mut uty = u.transpose() * y;
    for (k, mut row) in uty.row_iter_mut().enumerate() {
        let sk = s[k];
        let factor = if sk == 0.0 { 0.0 } else { sk / (sk * sk + ridge) };
        row *= factor;
    }
    let theta = v_t.transpose() * uty;
    if theta.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem);
    }
    Ok(theta)
}

/// A fitted ELM.
#[derive(Debug, Clone, PartialEq)]
pub struct ElmModel {
    pub hidden: ElmHidden,
    /// `H × n_out`; the only trained parameters.
    pub output_weights: Matrix,
    pub ridge: f64,
}

impl ElmModel {
    pub fn predict(&self, x: &Matrix) -> Result<Matrix> {
        Ok(self.hidden.features(x)? * &self.output_weights)
    }
}

/// Draws the hidden layer from `cfg.seed` and fits the output layer.
pub fn elm_train(x: &Matrix, y: &Matrix, cfg: &ElmConfig) -> Result<ElmModel> {
    if cfg.hidden == 0 {
        return Err(Error::Config("ELM hidden size must be >= 1".into()));
    }
    ElmHidden::draw(x.ncols(), cfg.hidden, cfg.seed).fit(x, y, cfg.ridge)
}
