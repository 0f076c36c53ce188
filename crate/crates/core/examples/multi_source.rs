//! Multi-source network: the synthetic source split into two domains,
//! trained with distribution-alignment and regressor-agreement losses.
//!
//! ```text
//! cargo run --release --example multi_source
//! ```

use srcsel::evaluation::unit_scale;
use srcsel::synthetic::shifted_cluster;
use srcsel::transfer::{fit_msann, msann_param_count, MsAnnConfig};

fn main() -> srcsel::Result<()> {
    for n in 1..=4 {
        println!("parameters with {n} source(s), 4 inputs: {}", msann_param_count(4, 1, n));
    }

    let task = shifted_cluster(0)?;
    let (near, far): (Vec<usize>, Vec<usize>) = (0..task.source.n_rows()).partition(|i| !task.cluster_rows.contains(i));
    let raw = [task.source.select_rows(&near)?, task.source.select_rows(&far)?];
    let (sources, target, _) = unit_scale(&raw, &task.target)?;

    let cfg = MsAnnConfig { epoch_max: 60, ..MsAnnConfig::default() };
    let model = fit_msann(&sources, &target, &cfg, 0)?;
    let pred = model.predict(target.inputs())?;
    let rmse = ((&pred - target.outputs()).norm_squared() / target.n_rows() as f64).sqrt();
    println!("\ntrained {} steps over {} parameters", model.steps(), model.n_params());
    println!("in-sample target RMSE (target labels unused in training): {rmse:.4}");
    Ok(())
}
