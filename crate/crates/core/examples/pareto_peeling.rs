//! Peeling Pareto frontiers, first on a hand-made point set and then on the
//! distance table of the shifted-cluster task.
//!
//! ```text
//! cargo run --example pareto_peeling
//! ```

use srcsel::distances::{compute_distance_table, Metric};
use srcsel::evaluation::unit_scale;
use srcsel::models::ElmConfig;
use srcsel::pareto::{pareto_frontier, peel_frontiers, peel_table};
use srcsel::synthetic::shifted_cluster;

fn main() -> srcsel::Result<()> {
    let points = vec![vec![1.0, 4.0], vec![2.0, 2.0], vec![4.0, 1.0], vec![3.0, 3.0], vec![5.0, 5.0]];
    println!("first frontier: {:?}", pareto_frontier(&points)?);
    for step in peel_frontiers(&points)? {
        println!("step {}: {:?} -> cumulative {:?}", step.step, step.selected, step.cumulative);
    }

    let task = shifted_cluster(0)?;
    let (sources, target, _) = unit_scale(std::slice::from_ref(&task.source), &task.target)?;
    let table = compute_distance_table(&sources[0], &target, &[Metric::Euclidean, Metric::Performance], &ElmConfig::default())?;
    println!("\nshifted cluster, euclidean + performance:");
    for step in peel_table(&table)? {
        let far = step.selected.iter().filter(|i| task.cluster_rows.contains(i)).count();
        println!(
            "step {:>2}: {:>2} rows ({far} from the far cluster), cumulative {}",
            step.step,
            step.selected.len(),
            step.cumulative.len()
        );
    }
    Ok(())
}
