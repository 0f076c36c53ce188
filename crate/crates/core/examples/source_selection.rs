//! End-to-end selection: distances, frontier peeling, and local plus
//! exhaustive search with I-DTR under the multi-run protocol.
//!
//! ```text
//! cargo run --release --example source_selection -- [n_runs]
//! ```

use srcsel::evaluation::{render_report, run_loaded, DatasetRef, Method, Mode, ReportFormat, TaskSpec};
use srcsel::distances::Metric;
use srcsel::synthetic::shifted_cluster;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n_runs: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(5);
    let task = shifted_cluster(0)?;
    let unused = |p: &str| DatasetRef { path: p.into(), n_in: 3, n_out: 1, name: None };
    let mut spec = TaskSpec {
        task_id: "shifted-cluster".into(),
        sources: vec![unused("source.csv")],
        target: unused("target.csv"),
        method: Method::Idtr,
        metrics: vec![Metric::Euclidean, Metric::Performance],
        mode: Mode::Local,
        subset: None,
        n_runs,
        seed: 0,
        elm: Default::default(),
        idtr: Default::default(),
        ftann: Default::default(),
        msann: Default::default(),
    };

    for mode in [Mode::Local, Mode::Exhaustive] {
        spec.mode = mode;
        let report = run_loaded(&spec, std::slice::from_ref(&task.source), &task.target)?;
        let trace = report.trace.as_ref().expect("search modes keep a trace");
        let far = trace.chosen_subset.iter().filter(|i| task.cluster_rows.contains(i)).count();
        println!(
            "{}: step {} with {} rows ({far} far), median RMSE {:.4}; baseline {:.4}",
            mode.name(),
            trace.chosen_step,
            trace.chosen_subset.len(),
            trace.chosen_sigma(),
            report.baseline_rmse()
        );
        if mode == Mode::Exhaustive {
            print!("\n{}", render_report(&report, ReportFormat::Csv)?);
        }
    }
    Ok(())
}
