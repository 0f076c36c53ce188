use serde::{Deserialize, Serialize};

use crate::distances::DistanceTable;
use crate::error::{Error, Result};

/// `a` dominates `b` under minimization: no worse anywhere, better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

fn check(points: &[Vec<f64>]) -> Result<usize> {
    let m = points.first().map_or(0, Vec::len);
    if m == 0 || points.iter().any(|p| p.len() != m) {
        return Err(Error::DimensionMismatch);
    }
    Ok(m)
}

/// Indices of non-dominated points among `candidates`, in ascending order.
fn frontier_of(points: &[Vec<f64>], candidates: &[usize]) -> Vec<usize> {
    candidates
        .iter()
        .copied()
        .filter(|&i| !candidates.iter().any(|&j| j != i && dominates(&points[j], &points[i])))
        .collect()
}

/// Indices of all non-dominated points, ascending. Duplicates are all kept.
pub fn pareto_frontier(points: &[Vec<f64>]) -> Result<Vec<usize>> {
    if points.is_empty() {
        return Err(Error::EmptyData);
    }
    check(points)?;
    let all: Vec<usize> = (0..points.len()).collect();
    Ok(frontier_of(points, &all))
}

/// One layer of the peeled frontier sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontierStep {
    /// 1-based step number.
    pub step: usize,
    /// Rows first selected at this step.
    pub selected: Vec<usize>,
    /// Rows selected at this or any earlier step, ascending.
    pub cumulative: Vec<usize>,
}

/// Removes the frontier repeatedly until every point has been assigned.
pub fn peel_frontiers(points: &[Vec<f64>]) -> Result<Vec<FrontierStep>> {
    if points.is_empty() {
        return Ok(Vec::new());
    }
    check(points)?;
    let mut remaining: Vec<usize> = (0..points.len()).collect();
    let mut cumulative = Vec::new();
    let mut steps = Vec::new();
    while !remaining.is_empty() {
        let selected = frontier_of(points, &remaining);
        remaining.retain(|i| selected.binary_search(i).is_err());
        cumulative.extend_from_slice(&selected);
        cumulative.sort_unstable();
        steps.push(FrontierStep { step: steps.len() + 1, selected, cumulative: cumulative.clone() });
    }
    Ok(steps)
}

/// Peels the normalized columns of a distance table.
pub fn peel_table(table: &DistanceTable) -> Result<Vec<FrontierStep>> {
    peel_frontiers(&table.normalized)
}
