use serde::{Deserialize, Serialize};

use super::task::EvalReport;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

pub const CSV_HEADER: [&str; 8] = ["task", "method", "mode", "median_rmse", "step", "subset_size", "baseline_rmse", "seed"];

/// CSV has one row per evaluated search step, or a single row when nothing
/// was searched. JSON carries the whole report, including per-run scores.
pub fn render_report(report: &EvalReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER)?;
            let base = report.baseline_rmse().to_string();
            let seed = report.seed.to_string();
            let mut row = |median: f64, step: Option<usize>, size: usize| {
                w.write_record([
                    report.task_id.as_str(),
                    report.method.name(),
                    report.mode.name(),
                    &median.to_string(),
                    &step.map(|s| s.to_string()).unwrap_or_default(),
                    &size.to_string(),
                    &base,
                    &seed,
                ])
            };
            match &report.trace {
                Some(trace) => {
                    for rec in &trace.steps {
                        row(rec.evaluation.sigma, Some(rec.frontier.step), rec.frontier.cumulative.len())?;
                    }
                }
                None => row(report.result.stats.median, report.result.step, report.result.subset_size)?,
            }
            let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

pub fn parse_json_report(text: &str) -> Result<EvalReport> {
    Ok(serde_json::from_str(text)?)
}
