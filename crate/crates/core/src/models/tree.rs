//! Weighted CART regression tree with axis-aligned splits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Matrix;

pub const DEFAULT_MAX_DEPTH: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        value: f64,
    },
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub root: Node,
    pub n_features: usize,
}

/// The best split found at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitChoice {
    pub feature: usize,
    pub threshold: f64,
    /// Weighted sum of squared deviations of both children.
    pub cost: f64,
}

#[derive(Default, Clone, Copy)]
struct Moments {
    w: f64,
    wy: f64,
    wyy: f64,
}

impl Moments {
    fn add(&mut self, w: f64, y: f64) {
        self.w += w;
        self.wy += w * y;
        self.wyy += w * y * y;
    }

    fn minus(&self, o: &Moments) -> Moments {
        Moments { w: self.w - o.w, wy: self.wy - o.wy, wyy: self.wyy - o.wyy }
    }

    fn sse(&self) -> f64 {
        if self.w <= 0.0 {
            0.0
        } else {
            (self.wyy - self.wy * self.wy / self.w).max(0.0)
        }
    }
}

/// Fits a tree on rows with positive weight; zero-weight rows are ignored.
pub fn tree_fit(x: &Matrix, y: &[f64], weights: &[f64], max_depth: usize) -> Result<RegressionTree> {
    if x.nrows() != y.len() || y.len() != weights.len() {
        return Err(Error::ShapeMismatch("tree inputs, targets and weights differ in length".into()));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::Config("sample weights must be finite and nonnegative".into()));
    }
    let rows: Vec<usize> = (0..y.len()).filter(|&i| weights[i] > 0.0).collect();
    if rows.is_empty() {
        return Err(Error::EmptyData);
    }
    let root = grow(x, y, weights, rows, 0, max_depth);
    Ok(RegressionTree { root, n_features: x.ncols() })
}

fn grow(x: &Matrix, y: &[f64], w: &[f64], rows: Vec<usize>, depth: usize, max_depth: usize) -> Node {
    let mut total = Moments::default();
    for &i in &rows {
        total.add(w[i], y[i]);
    }
    let value = total.wy / total.w;
    let pure = rows.iter().all(|&i| y[i] == y[rows[0]]);
    if depth >= max_depth || rows.len() < 2 || pure {
        return Node::Leaf { value };
    }
    match best_split(x, y, w, &rows) {
        Some(split) if split.cost < total.sse() => {
            let (left, right): (Vec<usize>, Vec<usize>) =
                rows.into_iter().partition(|&i| x[(i, split.feature)] <= split.threshold);
            Node::Split {
                feature: split.feature,
                threshold: split.threshold,
                left: Box::new(grow(x, y, w, left, depth + 1, max_depth)),
                right: Box::new(grow(x, y, w, right, depth + 1, max_depth)),
            }
        }
        _ => Node::Leaf { value },
    }
}

/// Scans midpoints between sorted distinct values of every feature.
/// Ties keep the lowest feature index, then the smallest threshold.
pub fn best_split(x: &Matrix, y: &[f64], w: &[f64], rows: &[usize]) -> Option<SplitChoice> {
    let mut total = Moments::default();
    for &i in rows {
        total.add(w[i], y[i]);
    }
    let mut best: Option<SplitChoice> = None;
    let mut order = rows.to_vec();
    for feature in 0..x.ncols() {
        order.sort_by(|&a, &b| x[(a, feature)].total_cmp(&x[(b, feature)]));
        let mut left = Moments::default();
        for k in 0..order.len() - 1 {
            let i = order[k];
            left.add(w[i], y[i]);
            let (lo, hi) = (x[(i, feature)], x[(order[k + 1], feature)]);
            if lo == hi {
                continue;
            }
            let mut threshold = lo + (hi - lo) / 2.0;
            if threshold >= hi {
                threshold = lo;
            }
            let cost = left.sse() + total.minus(&left).sse();
            if best.is_none_or(|b| cost < b.cost) {
                best = Some(SplitChoice { feature, threshold, cost });
            }
        }
    }
    best
}

impl RegressionTree {
    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { value } => return *value,
                Node::Split { feature, threshold, left, right } => {
                    node = if row[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.ncols() != self.n_features {
            return Err(Error::ShapeMismatch(format!("tree expects {} features, got {}", self.n_features, x.ncols())));
        }
        let mut row = vec![0.0; x.ncols()];
        Ok((0..x.nrows())
            .map(|r| {
                for (c, v) in row.iter_mut().enumerate() {
                    *v = x[(r, c)];
                }
                self.predict_row(&row)
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn column(xs: &[f64]) -> Matrix {
        Matrix::from_column_slice(xs.len(), 1, xs)
    }

    #[test]
    fn constant_target_is_single_leaf() {
        let t = tree_fit(&column(&[0.0, 1.0, 2.0]), &[4.0; 3], &[1.0; 3], 6).unwrap();
        assert_eq!(t.root, Node::Leaf { value: 4.0 });
        assert_eq!(t.predict(&column(&[-5.0, 9.0])).unwrap(), vec![4.0, 4.0]);
    }

    #[test]
    fn depth_one_step_function() {
        let x = column(&[0.0, 1.0, 2.0, 3.0]);
        let t = tree_fit(&x, &[0.0, 0.0, 10.0, 10.0], &[1.0; 4], 1).unwrap();
        match &t.root {
            Node::Split { feature, threshold, left, right } => {
                assert_eq!((*feature, *threshold), (0, 1.5));
                assert_eq!(**left, Node::Leaf { value: 0.0 });
                assert_eq!(**right, Node::Leaf { value: 10.0 });
            }
            other => panic!("expected split, got {other:?}"),
        }
        assert_eq!(t.predict(&column(&[0.7, 2.9])).unwrap(), vec![0.0, 10.0]);
    }

    #[test]
    fn deep_tree_interpolates_distinct_inputs() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.37).collect();
        let ys: Vec<f64> = (0..20).map(|i| ((i * 7) % 11) as f64).collect();
        let t = tree_fit(&column(&xs), &ys, &[1.0; 20], 10).unwrap();
        assert_eq!(t.predict(&column(&xs)).unwrap(), ys);
    }

    #[test]
    fn depth_is_bounded_and_leaves_are_weighted_means() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = Matrix::from_fn(60, 3, |_, _| rng.random::<f64>());
        let y: Vec<f64> = (0..60).map(|_| rng.random::<f64>()).collect();
        let t = tree_fit(&x, &y, &vec![1.0; 60], DEFAULT_MAX_DEPTH).unwrap();
        assert!(t.depth() <= DEFAULT_MAX_DEPTH);

        let t = tree_fit(&column(&[1.0, 1.0]), &[0.0, 3.0], &[2.0, 1.0], 6).unwrap();
        assert_eq!(t.root, Node::Leaf { value: 1.0 });
    }

    #[test]
    fn prediction_is_row_order_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = Matrix::from_fn(30, 2, |_, _| rng.random::<f64>());
        let y: Vec<f64> = (0..30).map(|_| rng.random::<f64>()).collect();
        let t = tree_fit(&x, &y, &vec![1.0; 30], 4).unwrap();
        let p = t.predict(&x).unwrap();
        let perm: Vec<usize> = (0..30).rev().collect();
        let q = t.predict(&x.select_rows(&perm)).unwrap();
        for (k, &r) in perm.iter().enumerate() {
            assert_eq!(q[k], p[r]);
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(tree_fit(&column(&[1.0]), &[1.0], &[0.0], 6), Err(Error::EmptyData)));
        assert!(tree_fit(&column(&[1.0]), &[1.0], &[-1.0], 6).is_err());
        let t = tree_fit(&column(&[1.0]), &[1.0], &[1.0], 6).unwrap();
        assert!(matches!(t.predict(&Matrix::zeros(1, 2)), Err(Error::ShapeMismatch(_))));
    }

    fn weighted_sse(ys: &[f64], ws: &[f64]) -> f64 {
        let sw: f64 = ws.iter().sum();
        if sw == 0.0 {
            return 0.0;
        }
        let mean = ys.iter().zip(ws).map(|(y, w)| y * w).sum::<f64>() / sw;
        ys.iter().zip(ws).map(|(y, w)| w * (y - mean) * (y - mean)).sum()
    }

    /// Root split against an exhaustive search over every midpoint candidate.
    #[test]
    fn root_split_matches_exhaustive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.random_range(2..=30);
            let d = rng.random_range(1..=3);
            let x = Matrix::from_fn(n, d, |_, _| (rng.random_range(0..8) as f64) / 4.0);
            let y: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..2.0)).collect();
            let rows: Vec<usize> = (0..n).collect();

            let mut oracle = f64::INFINITY;
            for f in 0..d {
                let mut vals: Vec<f64> = (0..n).map(|i| x[(i, f)]).collect();
                vals.sort_by(f64::total_cmp);
                vals.dedup();
                for pair in vals.windows(2) {
                    let thr = (pair[0] + pair[1]) / 2.0;
                    let (mut ly, mut lw, mut ry, mut rw) = (vec![], vec![], vec![], vec![]);
                    for i in 0..n {
                        if x[(i, f)] <= thr {
                            ly.push(y[i]);
                            lw.push(w[i]);
                        } else {
                            ry.push(y[i]);
                            rw.push(w[i]);
                        }
                    }
                    oracle = oracle.min(weighted_sse(&ly, &lw) + weighted_sse(&ry, &rw));
                }
            }
            match best_split(&x, &y, &w, &rows) {
                Some(s) => assert!((s.cost - oracle).abs() < 1e-9, "{} vs {}", s.cost, oracle),
                None => assert!(oracle.is_infinite()),
            }
        }
    }
}
