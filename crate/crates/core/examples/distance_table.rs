//! Source-to-target distances on the shifted-cluster task.
//!
//! The 18 far-away source rows should score as the most distant on every
//! metric.
//!
//! ```text
//! cargo run --example distance_table
//! ```

use srcsel::distances::{compute_distance_table, Metric};
use srcsel::evaluation::unit_scale;
use srcsel::models::ElmConfig;
use srcsel::synthetic::shifted_cluster;

fn main() -> srcsel::Result<()> {
    let task = shifted_cluster(0)?;
    let (sources, target, _) = unit_scale(std::slice::from_ref(&task.source), &task.target)?;
    let table = compute_distance_table(&sources[0], &target, &Metric::ALL, &ElmConfig::default())?;

    for (m, metric) in table.metrics.iter().enumerate() {
        let mean = |rows: &mut dyn Iterator<Item = usize>| {
            let v: Vec<f64> = rows.map(|i| table.normalized[i][m]).collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        let far = mean(&mut task.cluster_rows.iter().copied());
        let near = mean(&mut (0..table.n_rows()).filter(|i| !task.cluster_rows.contains(i)));
        println!("{:<12} mean normalized distance: near rows {near:.3}, far cluster {far:.3}", metric.name());
    }
    println!("\nfirst rows of the CSV form:");
    for line in table.to_csv()?.lines().take(4) {
        println!("{line}");
    }
    Ok(())
}
