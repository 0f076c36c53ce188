use crate::error::{Error, Result};

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn check(source_row: &[f64], target_rows: &[Vec<f64>]) -> Result<()> {
    if target_rows.is_empty() {
        return Err(Error::EmptyTarget);
    }
    if target_rows.iter().any(|t| t.len() != source_row.len()) {
        return Err(Error::DimensionMismatch);
    }
    Ok(())
}

/// Index of the target row closest to `point`; ties go to the lowest index.
fn nearest(point: &[f64], target_rows: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, t) in target_rows.iter().enumerate() {
        let d = squared_distance(point, t);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// Smallest Euclidean distance from a source row to any target row.
pub fn euclidean_distance(source_row: &[f64], target_rows: &[Vec<f64>]) -> Result<f64> {
    check(source_row, target_rows)?;
    Ok(nearest(source_row, target_rows).1.sqrt())
}

/// Angle-based distance between a source row and the local target geometry.
///
/// With `k` the target row nearest to the source row and `v1 = s − t_k`, the
/// partner `j` is the target row closest to `t_k` among those strictly on the
/// source side of the hyperplane through `t_k` normal to `v1`. The result is
/// `1 − cos(v1, t_j − t_k)`; it is 1 when no partner exists and 0 when the
/// source row coincides with `t_k`.
pub fn cosine_distance(source_row: &[f64], target_rows: &[Vec<f64>]) -> Result<f64> {
    check(source_row, target_rows)?;
    let (k, _) = nearest(source_row, target_rows);
    let anchor = &target_rows[k];
    let v1: Vec<f64> = source_row.iter().zip(anchor).map(|(s, t)| s - t).collect();
    let n1 = v1.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n1 == 0.0 {
        return Ok(0.0);
    }

    let mut partner: Option<(Vec<f64>, f64)> = None;
    for (j, t) in target_rows.iter().enumerate() {
        if j == k {
            continue;
        }
        let v2: Vec<f64> = t.iter().zip(anchor).map(|(a, b)| a - b).collect();
        let dot: f64 = v1.iter().zip(&v2).map(|(a, b)| a * b).sum();
        if dot <= 0.0 {
            continue;
        }
        let d = v2.iter().map(|v| v * v).sum::<f64>();
        if partner.as_ref().is_none_or(|(_, best)| d < *best) {
            partner = Some((v2, d));
        }
    }
    let Some((v2, d2)) = partner else {
        return Ok(1.0);
    };
    let dot: f64 = v1.iter().zip(&v2).map(|(a, b)| a * b).sum();
    Ok(1.0 - dot / (n1 * d2.sqrt()))
}
