//! Writes the shifted-cluster synthetic task as CSV files.
//!
//! ```text
//! cargo run --example synthetic_fixture -- [out_dir] [seed]
//! ```

use std::path::PathBuf;

use srcsel::synthetic::{shifted_cluster, write_csv};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "fixtures".into()));
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);

    let task = shifted_cluster(seed)?;
    std::fs::create_dir_all(&out)?;
    write_csv(&task.source, out.join("shifted_cluster_source.csv"))?;
    write_csv(&task.target, out.join("shifted_cluster_target.csv"))?;
    println!(
        "wrote {} source rows ({} in the far cluster) and {} target rows to {}",
        task.source.n_rows(),
        task.cluster_rows.len(),
        task.target.n_rows(),
        out.display()
    );
    Ok(())
}
