//! Pre-training an MLP on the source and fine-tuning it on the target,
//! compared with an MLP trained on the target alone.
//!
//! ```text
//! cargo run --release --example fine_tuning
//! ```

use srcsel::evaluation::{multi_run_median, unit_scale, FtAnnTrainer, RunSeeds};
use srcsel::models::mlp_param_count;
use srcsel::synthetic::shifted_cluster;
use srcsel::transfer::FineTuneConfig;

fn main() -> srcsel::Result<()> {
    let task = shifted_cluster(0)?;
    let (sources, target, _) = unit_scale(std::slice::from_ref(&task.source), &task.target)?;
    let near: Vec<usize> = (0..sources[0].n_rows()).filter(|i| !task.cluster_rows.contains(i)).collect();
    let near = sources[0].select_rows(&near)?;

    println!("MLP parameters for 3 inputs, 1 output: {}", mlp_param_count(3, 1));
    let trainer = FtAnnTrainer(FineTuneConfig::default());
    let runs = 5;
    for (label, src, step) in [("target only", vec![], 0), ("all source", sources.clone(), 1), ("near rows", vec![near], 2)] {
        let seeds = RunSeeds { master: 0, task: "fine-tuning-example", step };
        let stats = multi_run_median(&trainer, &src, &target, runs, &seeds)?;
        println!("{label:<12} median LOOCV RMSE over {runs} runs: {:.4} (IQR {:.4}..{:.4})", stats.median, stats.q1, stats.q3);
    }
    Ok(())
}
