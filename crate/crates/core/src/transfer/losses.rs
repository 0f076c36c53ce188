//! Domain-discrepancy and regressor-agreement losses, each with its gradient.

use serde::{Deserialize, Serialize};

use super::msann::MsAnnConfig;
use crate::error::{Error, Result};
use crate::Matrix;

/// How the Gaussian kernel width is chosen for MMD.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bandwidth {
    /// Median distance over all distinct row pairs of both sets.
    Median,
    Fixed(f64),
}

/// Step-dependent weight on the discrepancy and agreement terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BetaSchedule {
    /// `1 + 1/(1 + e^{10 p})`, decaying from 1.5 towards 1.
    Decay,
    /// `2/(1 + e^{−10 p}) − 1`, rising from 0 towards 1.
    RampUp,
}

fn check_pair(a: &Matrix, b: &Matrix) -> Result<()> {
    if a.ncols() != b.ncols() || a.nrows() == 0 || b.nrows() == 0 {
        return Err(Error::ShapeMismatch(format!(
            "feature sets {}x{} and {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(())
}

fn stacked_row<'a>(a: &'a Matrix, b: &'a Matrix, i: usize) -> nalgebra::RowDVector<f64> {
    if i < a.nrows() {
        a.row(i).into_owned()
    } else {
        b.row(i - a.nrows()).into_owned()
    }
}

/// Picks the median of distinct pairwise distances. Returns the width and
/// the pairs (with their share of the median) it depends on.
fn median_width(rows: &[nalgebra::RowDVector<f64>]) -> (f64, Vec<(usize, usize, f64)>) {
    let mut pairs = Vec::new();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            pairs.push(((&rows[i] - &rows[j]).norm(), i, j));
        }
    }
    if pairs.is_empty() {
        return (1.0, Vec::new());
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    let n = pairs.len();
    let picks: Vec<(usize, usize, f64)> = if n % 2 == 1 {
        vec![(pairs[n / 2].1, pairs[n / 2].2, 1.0)]
    } else {
        vec![(pairs[n / 2 - 1].1, pairs[n / 2 - 1].2, 0.5), (pairs[n / 2].1, pairs[n / 2].2, 0.5)]
    };
    let h: f64 = picks.iter().map(|&(i, j, s)| s * (&rows[i] - &rows[j]).norm()).sum();
    if h > 0.0 {
        (h, picks)
    } else {
        (1.0, Vec::new())
    }
}

/// Squared MMD (biased V-statistic) with a Gaussian kernel, plus gradients
/// with respect to every row of `a` and `b`.
pub fn mmd_with_grad(a: &Matrix, b: &Matrix, bandwidth: Bandwidth) -> Result<(f64, Matrix, Matrix)> {
    check_pair(a, b)?;
    let (na, nb) = (a.nrows(), b.nrows());
    let n = na + nb;
    let rows: Vec<_> = (0..n).map(|i| stacked_row(a, b, i)).collect();
    let (h, picks) = match bandwidth {
        Bandwidth::Median => median_width(&rows),
        Bandwidth::Fixed(h) => (h, Vec::new()),
    };
    let coef = |i: usize, j: usize| match (i < na, j < na) {
        (true, true) => 1.0 / (na * na) as f64,
        (false, false) => 1.0 / (nb * nb) as f64,
        _ => -1.0 / (na * nb) as f64,
    };
    let two_h2 = 2.0 * h * h;
    let mut loss = 0.0;
    let mut d_h = 0.0;
    let mut grad = Matrix::zeros(n, a.ncols());
    for i in 0..n {
        for j in 0..n {
            let diff = &rows[i] - &rows[j];
            let d2 = diff.norm_squared();
            let k = (-d2 / two_h2).exp();
            let c = coef(i, j);
            loss += c * k;
            if i != j {
                // d/dx_i of k(x_i, x_j); the symmetric term arrives when (j, i) is visited.
                let g = diff * (-2.0 * c * k / two_h2);
                let mut gi = grad.row_mut(i);
                gi += &g;
                let mut gj = grad.row_mut(j);
                gj -= &g;
                d_h += c * k * d2 / (h * h * h);
            }
        }
    }
    for (i, j, share) in picks {
        let diff = &rows[i] - &rows[j];
        let dist = diff.norm();
        let g = diff * (d_h * share / dist);
        let mut gi = grad.row_mut(i);
        gi += &g;
        let mut gj = grad.row_mut(j);
        gj -= &g;
    }
    let ga = grad.rows(0, na).into_owned();
    let gb = grad.rows(na, nb).into_owned();
    Ok((loss.max(0.0), ga, gb))
}

pub fn mmd(a: &Matrix, b: &Matrix) -> Result<f64> {
    Ok(mmd_with_grad(a, b, Bandwidth::Median)?.0)
}

/// Sample covariance (divisor `n − 1`, or 1 for a single row) and the centered data.
fn covariance(x: &Matrix) -> (Matrix, Matrix) {
    let mean = x.row_mean();
    let mut centered = x.clone();
    for mut row in centered.row_iter_mut() {
        row -= &mean;
    }
    let denom = (x.nrows().max(2) - 1) as f64;
    ((centered.transpose() * &centered) / denom, centered)
}

/// `‖C_A − C_B‖²_F / (4 d²)` and its gradients.
pub fn coral_with_grad(a: &Matrix, b: &Matrix) -> Result<(f64, Matrix, Matrix)> {
    check_pair(a, b)?;
    let d = a.ncols() as f64;
    let (ca, xa) = covariance(a);
    let (cb, xb) = covariance(b);
    let diff = ca - cb;
    let scale = 1.0 / (4.0 * d * d);
    let loss = scale * diff.norm_squared();
    let g = diff * (2.0 * scale);
    let da = &xa * &g * (2.0 / (a.nrows().max(2) - 1) as f64);
    let db = &xb * &g * (-2.0 / (b.nrows().max(2) - 1) as f64);
    Ok((loss, da, db))
}

pub fn coral(a: &Matrix, b: &Matrix) -> Result<f64> {
    Ok(coral_with_grad(a, b)?.0)
}

/// `2/(N(N−1)·N_t) · Σ_{i<j} MSE(o_i, o_j)` over `N ≥ 2` equally shaped outputs,
/// with gradients for every output.
pub fn regressor_distance_with_grad(outputs: &[Matrix]) -> Result<(f64, Vec<Matrix>)> {
    let n = outputs.len();
    if n < 2 {
        return Err(Error::NeedTwoRegressors);
    }
    let shape = outputs[0].shape();
    if outputs.iter().any(|o| o.shape() != shape) || shape.0 == 0 {
        return Err(Error::ShapeMismatch("regressor outputs differ in shape".into()));
    }
    let n_t = shape.0 as f64;
    let entries = (shape.0 * shape.1) as f64;
    let scale = 2.0 / (n as f64 * (n - 1) as f64 * n_t);
    let mut loss = 0.0;
    let mut grads = vec![Matrix::zeros(shape.0, shape.1); n];
    for i in 0..n {
        for j in i + 1..n {
            let diff = &outputs[i] - &outputs[j];
            loss += scale * diff.norm_squared() / entries;
            let g = diff * (2.0 * scale / entries);
            grads[i] += &g;
            grads[j] -= &g;
        }
    }
    Ok((loss, grads))
}

pub fn regressor_distance(outputs: &[Matrix]) -> Result<f64> {
    Ok(regressor_distance_with_grad(outputs)?.0)
}

/// The printed schedule `1 + 1/(1 + e^{10·step/step_max})`.
pub fn beta_step(step: usize, step_max: usize) -> f64 {
    BetaSchedule::Decay.at(step, step_max)
}

impl BetaSchedule {
    pub fn at(self, step: usize, step_max: usize) -> f64 {
        let p = step as f64 / step_max.max(1) as f64;
        match self {
            BetaSchedule::Decay => 1.0 + 1.0 / (1.0 + (10.0 * p).exp()),
            BetaSchedule::RampUp => 2.0 / (1.0 + (-10.0 * p).exp()) - 1.0,
        }
    }
}

/// `L_error + γ β L_dis + μ β L_reg`.
pub fn total_loss(l_error: f64, l_dis: f64, l_reg: f64, step: usize, step_max: usize, cfg: &MsAnnConfig) -> Result<f64> {
    let beta = cfg.schedule.at(step, step_max);
    let total = l_error + cfg.gamma * beta * l_dis + cfg.mu * beta * l_reg;
    if !total.is_finite() {
        return Err(Error::NonFinite("total loss"));
    }
    Ok(total)
}
