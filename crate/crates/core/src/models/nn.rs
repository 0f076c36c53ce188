//! Dense layers over a flat parameter buffer, with manual backprop and Adam.

use nalgebra::DMatrixView;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::Matrix;

/// Location of one affine map `z = W x + b` inside a flat parameter buffer.
///
/// `W` is stored column-major as `n_out × n_in`, followed by the `n_out` biases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dense {
    pub n_in: usize,
    pub n_out: usize,
    pub offset: usize,
}

impl Dense {
    pub fn len(&self) -> usize {
        self.n_in * self.n_out + self.n_out
    }

    fn weight_range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.n_in * self.n_out
    }

    fn bias_range(&self) -> std::ops::Range<usize> {
        let start = self.offset + self.n_in * self.n_out;
        start..start + self.n_out
    }

    fn weights<'a>(&self, params: &'a [f64]) -> DMatrixView<'a, f64> {
        DMatrixView::from_slice(&params[self.weight_range()], self.n_out, self.n_in)
    }

    /// `x` is `batch × n_in`; returns `batch × n_out`.
    pub fn forward(&self, params: &[f64], x: &Matrix) -> Matrix {
        let mut z = x * self.weights(params).transpose();
        let bias = &params[self.bias_range()];
        for mut row in z.row_iter_mut() {
            for (v, b) in row.iter_mut().zip(bias) {
                *v += b;
            }
        }
        z
    }

    /// Accumulates parameter gradients into `grad` and returns `dL/dx`.
    pub fn backward(&self, params: &[f64], x: &Matrix, dz: &Matrix, grad: &mut [f64]) -> Matrix {
        let dw = dz.transpose() * x;
        for (g, d) in grad[self.weight_range()].iter_mut().zip(dw.iter()) {
            *g += d;
        }
        for (j, g) in grad[self.bias_range()].iter_mut().enumerate() {
            *g += dz.column(j).sum();
        }
        dz * self.weights(params)
    }

    /// Uniform(−1/√fan_in, 1/√fan_in) for weights and biases.
    pub fn init(&self, params: &mut [f64], rng: &mut impl Rng) {
        let bound = (1.0 / self.n_in as f64).sqrt();
        for p in &mut params[self.offset..self.offset + self.len()] {
            *p = rng.random_range(-bound..=bound);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Relu,
    Identity,
}

/// A dense layer, its activation, and the dropout probability applied after it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub dense: Dense,
    pub activation: Activation,
    pub dropout: f64,
}

/// Intermediate values of a forward pass needed by the backward pass.
#[derive(Debug, Clone)]
pub struct Tape {
    inputs: Vec<Matrix>,
    pre_activations: Vec<Matrix>,
    masks: Vec<Option<Matrix>>,
}

/// Lays out consecutive layers starting at `offset`; returns the layers and the end offset.
pub fn layout(sizes: &[usize], activations: &[Activation], dropouts: &[f64], mut offset: usize) -> (Vec<Layer>, usize) {
    let mut layers = Vec::with_capacity(sizes.len() - 1);
    for (k, pair) in sizes.windows(2).enumerate() {
        let dense = Dense { n_in: pair[0], n_out: pair[1], offset };
        offset += dense.len();
        layers.push(Layer { dense, activation: activations[k], dropout: dropouts[k] });
    }
    (layers, offset)
}

/// Runs `x` through `layers`. Dropout is sampled only when `rng` is given
/// (inverted scaling, so inference needs no correction).
pub fn forward<'r>(params: &[f64], layers: &[Layer], x: &Matrix, mut rng: Option<&mut (dyn RngCore + 'r)>) -> (Matrix, Tape) {
    let mut tape = Tape {
        inputs: Vec::with_capacity(layers.len()),
        pre_activations: Vec::with_capacity(layers.len()),
        masks: Vec::with_capacity(layers.len()),
    };
    let mut a = x.clone();
    for layer in layers {
        let z = layer.dense.forward(params, &a);
        let mut out = match layer.activation {
            Activation::Relu => z.map(|v| v.max(0.0)),
            Activation::Identity => z.clone(),
        };
        let mask = match rng.as_deref_mut() {
            Some(rng) if layer.dropout > 0.0 => {
                let keep = 1.0 - layer.dropout;
                let m = Matrix::from_fn(out.nrows(), out.ncols(), |_, _| {
                    if rng.random::<f64>() < keep {
                        1.0 / keep
                    } else {
                        0.0
                    }
                });
                out.component_mul_assign(&m);
                Some(m)
            }
            _ => None,
        };
        tape.inputs.push(std::mem::replace(&mut a, out));
        tape.pre_activations.push(z);
        tape.masks.push(mask);
    }
    (a, tape)
}

/// Backpropagates `d_out` through the recorded pass; returns `dL/dx`.
pub fn backward(params: &[f64], layers: &[Layer], tape: &Tape, d_out: &Matrix, grad: &mut [f64]) -> Matrix {
    let mut d = d_out.clone();
    for (k, layer) in layers.iter().enumerate().rev() {
        if let Some(mask) = &tape.masks[k] {
            d.component_mul_assign(mask);
        }
        if layer.activation == Activation::Relu {
            d.zip_apply(&tape.pre_activations[k], |g, z| {
                if z <= 0.0 {
                    *g = 0.0
                }
            });
        }
        d = layer.dense.backward(params, &tape.inputs[k], &d, grad);
    }
    d
}

/// Mean squared error over every entry, and its gradient w.r.t. `pred`.
pub fn mse_with_grad(pred: &Matrix, target: &Matrix) -> (f64, Matrix) {
    let n = (pred.nrows() * pred.ncols()) as f64;
    let diff = pred - target;
    let loss = diff.norm_squared() / n;
    (loss, diff * (2.0 / n))
}

/// Adam with bias correction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl Adam {
    pub fn new(n_params: usize, lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t as i32);
        let c2 = 1.0 - self.beta2.powi(self.t as i32);
        for (((p, g), m), v) in params.iter_mut().zip(grad).zip(&mut self.m).zip(&mut self.v) {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            *p -= self.lr * (*m / c1) / ((*v / c2).sqrt() + self.eps);
        }
    }
}
