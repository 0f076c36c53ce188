//! Two-stage TrAdaBoost.R2 over weighted regression trees.

use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::models::tree::{tree_fit, RegressionTree, DEFAULT_MAX_DEPTH};
use crate::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TwoStageBoostConfig {
    pub outer_steps: usize,
    pub inner_rounds: usize,
    pub max_depth: usize,
    /// Folds used to score each outer step on the target rows; `None` is leave-one-out.
    pub cv_folds: Option<usize>,
}

impl Default for TwoStageBoostConfig {
    fn default() -> Self {
        Self { outer_steps: 5, inner_rounds: 10, max_depth: DEFAULT_MAX_DEPTH, cv_folds: None }
    }
}

impl TwoStageBoostConfig {
    pub fn validate(&self) -> Result<()> {
        if self.outer_steps == 0 || self.inner_rounds == 0 {
            return Err(Error::Config("boosting needs at least one outer step and one inner round".into()));
        }
        if matches!(self.cv_folds, Some(k) if k < 2) {
            return Err(Error::Config("cross-validation needs at least two folds".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleMember {
    pub tree: RegressionTree,
    /// `ln(1/β)` of the boosting round that produced the tree.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdtrModel {
    pub members: Vec<EnsembleMember>,
    /// Cross-validation MSE of each outer step that ran.
    pub cv_errors: Vec<f64>,
    /// Outer step whose ensemble was kept.
    pub chosen_step: usize,
}

impl IdtrModel {
    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        idtr_predict(&self.members, x)
    }
}

/// Smallest value whose cumulative weight reaches half of the total.
/// Ties in value keep member order.
pub fn weighted_median(values: &[f64], weights: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    for &k in &order {
        acc += weights[k];
        if acc >= 0.5 * total {
            return values[k];
        }
    }
    values[order[order.len() - 1]]
}

pub fn idtr_predict(members: &[EnsembleMember], x: &Matrix) -> Result<Vec<f64>> {
    if members.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let preds = members.iter().map(|m| m.tree.predict(x)).collect::<Result<Vec<_>>>()?;
    let weights: Vec<f64> = members.iter().map(|m| m.weight).collect();
    Ok((0..x.nrows())
        .map(|r| {
            let column: Vec<f64> = preds.iter().map(|p| p[r]).collect();
            weighted_median(&column, &weights)
        })
        .collect())
}

/// Pooled rows: source first, then target.
struct Pool {
    x: Matrix,
    y: Vec<f64>,
    n_source: usize,
}

impl Pool {
    fn new(source: Option<(&Matrix, &[f64])>, tx: &Matrix, ty: &[f64]) -> Self {
        let (sx, sy) = match source {
            Some((sx, sy)) if sx.nrows() > 0 => (Some(sx), sy),
            _ => (None, &[][..]),
        };
        let n_source = sy.len();
        let n = n_source + ty.len();
        let x = Matrix::from_fn(n, tx.ncols(), |r, c| match sx {
            Some(sx) if r < n_source => sx[(r, c)],
            _ => tx[(r - n_source, c)],
        });
        let y = sy.iter().chain(ty).copied().collect();
        Self { x, y, n_source }
    }

    fn len(&self) -> usize {
        self.y.len()
    }
}

fn normalize(w: &mut [f64]) {
    let s: f64 = w.iter().sum();
    if s > 0.0 {
        w.iter_mut().for_each(|v| *v /= s);
    }
}

/// Residuals of `tree` scaled by the largest one; all zeros on a perfect fit.
fn adjusted_errors(tree: &RegressionTree, pool: &Pool) -> Result<Vec<f64>> {
    let pred = tree.predict(&pool.x)?;
    let r: Vec<f64> = pred.iter().zip(&pool.y).map(|(p, y)| (p - y).abs()).collect();
    let max = r.iter().copied().fold(0.0, f64::max);
    Ok(if max > 0.0 { r.iter().map(|v| v / max).collect() } else { vec![0.0; r.len()] })
}

/// AdaBoost.R2 in which only the target block's weights change.
fn boost_target(pool: &Pool, mut w: Vec<f64>, cfg: &TwoStageBoostConfig) -> Result<Vec<EnsembleMember>> {
    let ns = pool.n_source;
    let mut members: Vec<EnsembleMember> = Vec::new();
    for round in 0..cfg.inner_rounds {
        let tree = tree_fit(&pool.x, &pool.y, &w, cfg.max_depth)?;
        let e = adjusted_errors(&tree, pool)?;
        let target_mass: f64 = w[ns..].iter().sum();
        let eps = if target_mass > 0.0 {
            w[ns..].iter().zip(&e[ns..]).map(|(w, e)| w * e).sum::<f64>() / target_mass
        } else {
            0.0
        };
        if eps <= 0.0 {
            members.push(EnsembleMember { tree, weight: 1.0 });
            break;
        }
        if eps >= 0.5 {
            if members.is_empty() {
                members.push(EnsembleMember { tree, weight: 1.0 });
            }
            break;
        }
        let beta = eps / (1.0 - eps);
        members.push(EnsembleMember { tree, weight: (1.0 / beta).ln() });
        if round + 1 < cfg.inner_rounds {
            for (wi, ei) in w[ns..].iter_mut().zip(&e[ns..]) {
                *wi *= beta.powf(1.0 - ei);
            }
            normalize(&mut w);
        }
    }
    Ok(members)
}

/// Scales source weights by `β^{e_i}` with `β` chosen so the target block
/// carries `fraction` of the total, then renormalizes.
fn reweight_sources(w: &mut [f64], e: &[f64], n_source: usize, fraction: f64) {
    let target: f64 = w[n_source..].iter().sum();
    if fraction >= 1.0 {
        w[..n_source].iter_mut().for_each(|v| *v = 0.0);
        normalize(w);
        return;
    }
    let wanted_source = target * (1.0 - fraction) / fraction;
    let source_at = |beta: f64| -> f64 { w[..n_source].iter().zip(e).map(|(w, e)| w * beta.powf(*e)).sum() };
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if source_at(mid) > wanted_source {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let beta = 0.5 * (lo + hi);
    for (v, ei) in w[..n_source].iter_mut().zip(e) {
        *v *= beta.powf(*ei);
    }
    normalize(w);
}

fn target_fraction(t: usize, steps: usize, n_source: usize, n_target: usize) -> f64 {
    let base = n_target as f64 / (n_source + n_target) as f64;
    if steps <= 1 {
        base
    } else {
        base + t as f64 / (steps - 1) as f64 * (1.0 - base)
    }
}

/// Mean held-out MSE of the inner booster across target folds.
fn cross_validate(pool: &Pool, w: &[f64], cfg: &TwoStageBoostConfig) -> Result<f64> {
    let ns = pool.n_source;
    let nt = pool.len() - ns;
    let k = cfg.cv_folds.unwrap_or(nt).min(nt);
    let mut total = 0.0;
    for fold in 0..k {
        let held: Vec<usize> = (0..nt).filter(|j| j % k == fold).collect();
        let keep: Vec<usize> = (0..pool.len()).filter(|&i| i < ns || (i - ns) % k != fold).collect();
        let sub = Pool {
            x: pool.x.select_rows(&keep),
            y: keep.iter().map(|&i| pool.y[i]).collect(),
            n_source: ns,
        };
        let mut sw: Vec<f64> = keep.iter().map(|&i| w[i]).collect();
        if sw[ns..].iter().all(|&v| v == 0.0) {
            sw[ns..].iter_mut().for_each(|v| *v = 1.0);
        }
        normalize(&mut sw);
        let members = boost_target(&sub, sw, cfg)?;
        let test_x = pool.x.select_rows(held.iter().map(|j| ns + j).collect::<Vec<_>>().iter());
        let pred = idtr_predict(&members, &test_x)?;
        let mse = held.iter().zip(&pred).map(|(&j, p)| (p - pool.y[ns + j]).powi(2)).sum::<f64>() / held.len() as f64;
        total += mse;
    }
    Ok(total / k as f64)
}

/// Fits the two-stage booster on a single-output source/target pair.
/// The source may have zero rows, which reduces to AdaBoost.R2 on the target.
pub fn fit_idtr(source: Option<&LabeledDataset>, target: &LabeledDataset, cfg: &TwoStageBoostConfig) -> Result<IdtrModel> {
    cfg.validate()?;
    if target.n_out() != 1 || source.is_some_and(|s| s.n_out() != 1) {
        return Err(Error::ShapeMismatch("the tree booster handles a single output".into()));
    }
    if source.is_some_and(|s| s.n_in() != target.n_in()) {
        return Err(Error::DimensionMismatch);
    }
    let nt = target.n_rows();
    if nt < 2 {
        return Err(Error::TargetTooSmall(nt));
    }
    let sy: Vec<f64>;
    let src = match source {
        Some(s) => {
            sy = s.outputs().column(0).iter().copied().collect();
            Some((s.inputs(), &sy[..]))
        }
        None => None,
    };
    let ty: Vec<f64> = target.outputs().column(0).iter().copied().collect();
    let pool = Pool::new(src, target.inputs(), &ty);
    let ns = pool.n_source;
    let steps = if ns == 0 { 1 } else { cfg.outer_steps };

    let mut w = vec![1.0 / pool.len() as f64; pool.len()];
    let mut best: Option<(f64, usize, Vec<EnsembleMember>)> = None;
    let mut cv_errors = Vec::with_capacity(steps);
    for t in 0..steps {
        if t > 0 {
            let tree = tree_fit(&pool.x, &pool.y, &w, cfg.max_depth)?;
            let e = adjusted_errors(&tree, &pool)?;
            reweight_sources(&mut w, &e[..ns], ns, target_fraction(t, steps, ns, nt));
        }
        let cv = cross_validate(&pool, &w, cfg)?;
        if !cv.is_finite() {
            return Err(Error::NonFinite("boosting cross-validation error"));
        }
        cv_errors.push(cv);
        if best.as_ref().is_none_or(|(b, _, _)| cv < *b) {
            best = Some((cv, t, boost_target(&pool, w.clone(), cfg)?));
        }
        if cv == 0.0 {
            break;
        }
    }
    let (_, chosen_step, members) = best.expect("at least one outer step runs");
    Ok(IdtrModel { members, cv_errors, chosen_step })
}
