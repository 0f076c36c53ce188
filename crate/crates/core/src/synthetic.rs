//! Seeded synthetic transfer tasks used by the examples and tests.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::{LabeledDataset, Matrix};

pub const SOURCE_ROWS: usize = 60;
pub const TARGET_ROWS: usize = 9;
/// Rows of the source that belong to the far cluster (30%).
pub const CLUSTER_ROWS: usize = 18;

/// A source/target pair with known structure.
#[derive(Debug, Clone)]
pub struct SyntheticTask {
    pub source: LabeledDataset,
    pub target: LabeledDataset,
    /// Source row indices of the injected cluster.
    pub cluster_rows: Vec<usize>,
}

fn response(x: &[f64]) -> f64 {
    0.4 + 0.3 * (2.5 * x[0]).sin() + 0.25 * x[1] * x[2] - 0.15 * x[2]
}

/// Three inputs, one output. The target and 42 source rows share one input
/// distribution and response; the remaining 18 source rows sit far away in
/// input space and follow a conflicting response. Cluster rows are
/// interleaved with the in-distribution rows.
pub fn shifted_cluster(seed: u64) -> Result<SyntheticTask> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw_row = |far: bool, rng: &mut ChaCha8Rng| -> [f64; 4] {
        let x: [f64; 3] = if far {
            std::array::from_fn(|_| 2.5 + rng.random_range(-0.25..0.25))
        } else {
            std::array::from_fn(|_| rng.random_range(0.0..1.0))
        };
        let noise = rng.random_range(-0.01..0.01);
        let y = if far { 1.6 - 0.8 * response(&x) + noise } else { response(&x) + noise };
        [x[0], x[1], x[2], y]
    };

    let cluster_rows: Vec<usize> = (0..SOURCE_ROWS).filter(|i| i % 10 >= 7).collect();
    debug_assert_eq!(cluster_rows.len(), CLUSTER_ROWS);
    let source_rows: Vec<[f64; 4]> = (0..SOURCE_ROWS)
        .map(|i| draw_row(cluster_rows.contains(&i), &mut rng))
        .collect();
    let target_rows: Vec<[f64; 4]> = (0..TARGET_ROWS).map(|_| draw_row(false, &mut rng)).collect();

    let to_dataset = |rows: &[[f64; 4]], id: &str| {
        let n = rows.len();
        let inputs = Matrix::from_fn(n, 3, |r, c| rows[r][c]);
        let outputs = Matrix::from_fn(n, 1, |r, _| rows[r][3]);
        LabeledDataset::new(
            id,
            inputs,
            outputs,
            vec!["x0".into(), "x1".into(), "x2".into()],
            vec!["y".into()],
        )
    };
    Ok(SyntheticTask {
        source: to_dataset(&source_rows, "synthetic-source")?,
        target: to_dataset(&target_rows, "synthetic-target")?,
        cluster_rows,
    })
}

/// Writes a dataset as CSV with a header; values use round-trip formatting.
pub fn write_csv(ds: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io = |source| Error::Io { path: path.to_path_buf(), source };
    let mut f = std::fs::File::create(path).map_err(io)?;
    let header: Vec<&str> = ds.feature_names().iter().chain(ds.output_names()).map(String::as_str).collect();
    writeln!(f, "{}", header.join(",")).map_err(io)?;
    for i in 0..ds.n_rows() {
        let row: Vec<String> = ds.joined_row(i).iter().map(f64::to_string).collect();
        writeln!(f, "{}", row.join(",")).map_err(io)?;
    }
    Ok(())
}
