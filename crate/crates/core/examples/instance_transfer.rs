//! Two-stage TrAdaBoost.R2 against a target-only boosted tree, scored by
//! leave-one-out over the target rows.
//!
//! ```text
//! cargo run --release --example instance_transfer
//! ```

use srcsel::evaluation::{loocv_score, unit_scale, IdtrTrainer};
use srcsel::synthetic::shifted_cluster;
use srcsel::transfer::{fit_idtr, TwoStageBoostConfig};

fn main() -> srcsel::Result<()> {
    let task = shifted_cluster(0)?;
    let (sources, target, _) = unit_scale(std::slice::from_ref(&task.source), &task.target)?;
    let cfg = TwoStageBoostConfig::default();

    let model = fit_idtr(Some(&sources[0]), &target, &cfg)?;
    println!("outer-step CV errors: {:?}", model.cv_errors);
    println!("kept step {} with {} ensemble members", model.chosen_step, model.members.len());

    let trainer = IdtrTrainer(cfg);
    let near: Vec<usize> = (0..sources[0].n_rows()).filter(|i| !task.cluster_rows.contains(i)).collect();
    let near = sources[0].select_rows(&near)?;
    println!("LOOCV RMSE, target only:      {:.4}", loocv_score(&trainer, &[], &target, 0)?);
    println!("LOOCV RMSE, all source rows:  {:.4}", loocv_score(&trainer, &sources, &target, 0)?);
    println!("LOOCV RMSE, near rows only:   {:.4}", loocv_score(&trainer, &[near], &target, 0)?);
    Ok(())
}
