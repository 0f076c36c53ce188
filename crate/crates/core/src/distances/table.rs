use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{cosine_distance, euclidean_distance, ModelDistanceConfig, ModelRefits};
use crate::error::{Error, Result};
use crate::LabeledDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Euclidean,
    Cosine,
    Performance,
    Feature,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Euclidean, Metric::Cosine, Metric::Performance, Metric::Feature];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::Cosine => "cosine",
            Metric::Performance => "performance",
            Metric::Feature => "feature",
        }
    }

    pub fn needs_model(self) -> bool {
        matches!(self, Metric::Performance | Metric::Feature)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown metric {s:?}")))
    }
}

/// Raw and min-max normalized distances, one row per source row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceTable {
    pub metrics: Vec<Metric>,
    /// `raw[i][m]` is metric `m` of source row `i`.
    pub raw: Vec<Vec<f64>>,
    pub normalized: Vec<Vec<f64>>,
    /// ELM settings used for model metrics, if any were requested.
    pub elm: Option<ModelDistanceConfig>,
}

/// Min-max to [0, 1]; a constant column maps to all zeros.
pub fn normalize_column(values: &[f64]) -> Vec<f64> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max <= min {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - min) / (max - min)).collect()
}

impl DistanceTable {
    /// Builds a table from raw per-metric columns.
    pub fn from_columns(metrics: Vec<Metric>, columns: Vec<Vec<f64>>, elm: Option<ModelDistanceConfig>) -> Result<Self> {
        let n = columns.first().map_or(0, Vec::len);
        if metrics.is_empty() || metrics.len() != columns.len() || columns.iter().any(|c| c.len() != n) {
            return Err(Error::ShapeMismatch("distance columns".into()));
        }
        let norm: Vec<Vec<f64>> = columns.iter().map(|c| normalize_column(c)).collect();
        let transpose = |cols: &[Vec<f64>]| (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
        Ok(Self { metrics, raw: transpose(&columns), normalized: transpose(&norm), elm })
    }

    pub fn n_rows(&self) -> usize {
        self.raw.len()
    }

    /// Restricts to a subset of the metrics, renormalizing nothing (normalization is per column).
    pub fn project(&self, metrics: &[Metric]) -> Result<Self> {
        let idx: Vec<usize> = metrics
            .iter()
            .map(|m| {
                self.metrics
                    .iter()
                    .position(|x| x == m)
                    .ok_or_else(|| Error::Config(format!("metric {m} not in table")))
            })
            .collect::<Result<_>>()?;
        let pick = |rows: &[Vec<f64>]| rows.iter().map(|r| idx.iter().map(|&k| r[k]).collect()).collect();
        Ok(Self {
            metrics: metrics.to_vec(),
            raw: pick(&self.raw),
            normalized: pick(&self.normalized),
            elm: if metrics.iter().any(|m| m.needs_model()) { self.elm } else { None },
        })
    }

    /// CSV with `source_index` then `<metric>_raw,<metric>_norm` per metric.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["source_index".to_string()];
        for m in &self.metrics {
            header.push(format!("{m}_raw"));
            header.push(format!("{m}_norm"));
        }
        w.write_record(&header)?;
        for (i, (raw, norm)) in self.raw.iter().zip(&self.normalized).enumerate() {
            let mut rec = vec![i.to_string()];
            for (r, n) in raw.iter().zip(norm) {
                rec.push(r.to_string());
                rec.push(n.to_string());
            }
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Computes every requested metric for every source row.
///
/// Both datasets are expected to be unit-scaled already.
pub fn compute_distance_table(
    source: &LabeledDataset,
    target: &LabeledDataset,
    metrics: &[Metric],
    cfg: &ModelDistanceConfig,
) -> Result<DistanceTable> {
    if metrics.is_empty() {
        return Err(Error::Config("at least one distance metric is required".into()));
    }
    if source.n_in() != target.n_in() || source.n_out() != target.n_out() {
        return Err(Error::ShapeMismatch("source and target widths differ".into()));
    }
    let target_rows = target.joined_rows();
    let source_rows = source.joined_rows();
    let refits = if metrics.iter().any(|m| m.needs_model()) {
        Some(ModelRefits::compute(source, target, cfg)?)
    } else {
        None
    };

    let mut columns = Vec::with_capacity(metrics.len());
    for metric in metrics {
        let column = match metric {
            Metric::Euclidean => source_rows
                .iter()
                .map(|s| euclidean_distance(s, &target_rows))
                .collect::<Result<Vec<_>>>()?,
            Metric::Cosine => source_rows
                .iter()
                .map(|s| cosine_distance(s, &target_rows))
                .collect::<Result<Vec<_>>>()?,
            Metric::Performance => refits.as_ref().expect("refits computed").performance(target)?,
            Metric::Feature => refits.as_ref().expect("refits computed").feature()?,
        };
        columns.push(column);
    }
    DistanceTable::from_columns(metrics.to_vec(), columns, refits.map(|_| *cfg))
}
