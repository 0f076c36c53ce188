use serde::{Deserialize, Serialize};

use super::FrontierStep;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    Local,
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// Error rose after a step that beat the baseline.
    LocalTrigger,
    /// Local search ran out of frontiers; the best step seen was kept.
    ExhaustedWithoutTrigger,
    /// Every frontier was evaluated and the minimum taken.
    Exhaustive,
}

/// Score of one cumulative subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepEvaluation {
    pub sigma: f64,
    /// Per-run scores behind `sigma`, if the evaluator exposes them.
    pub runs: Vec<f64>,
}

impl StepEvaluation {
    pub fn from_sigma(sigma: f64) -> Self {
        Self { sigma, runs: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub frontier: FrontierStep,
    pub evaluation: StepEvaluation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchTrace {
    pub mode: SearchMode,
    pub sigma_baseline: f64,
    pub steps: Vec<StepRecord>,
    /// 1-based step whose cumulative subset was chosen.
    pub chosen_step: usize,
    pub chosen_subset: Vec<usize>,
    pub termination: Termination,
}

impl SearchTrace {
    pub fn chosen(&self) -> &StepRecord {
        &self.steps[self.chosen_step - 1]
    }

    pub fn chosen_sigma(&self) -> f64 {
        self.chosen().evaluation.sigma
    }
}

/// Position of the smallest sigma; ties go to the earliest step.
fn argmin(records: &[StepRecord]) -> usize {
    let mut best = 0;
    for (k, r) in records.iter().enumerate() {
        if r.evaluation.sigma < records[best].evaluation.sigma {
            best = k;
        }
    }
    best
}

fn finish(mode: SearchMode, sigma_baseline: f64, steps: Vec<StepRecord>, idx: usize, termination: Termination) -> SearchTrace {
    SearchTrace {
        mode,
        sigma_baseline,
        chosen_step: idx + 1,
        chosen_subset: steps[idx].frontier.cumulative.clone(),
        steps,
        termination,
    }
}

/// Walks the frontiers and stops at step `k` once `σ_k > σ_{k−1}` while
/// `σ_{k−1} < σ_baseline`, returning the subset through step `k − 1`.
pub fn local_search<F>(steps: &[FrontierStep], mut evaluate: F, sigma_baseline: f64) -> Result<SearchTrace>
where
    F: FnMut(&FrontierStep) -> Result<StepEvaluation>,
{
    assert!(!steps.is_empty(), "search needs at least one frontier");
    let mut records: Vec<StepRecord> = Vec::with_capacity(steps.len());
    for step in steps {
        let evaluation = evaluate(step)?;
        if let Some(prev) = records.last() {
            let prev_sigma = prev.evaluation.sigma;
            if evaluation.sigma > prev_sigma && prev_sigma < sigma_baseline {
                let idx = records.len() - 1;
                records.push(StepRecord { frontier: step.clone(), evaluation });
                return Ok(finish(SearchMode::Local, sigma_baseline, records, idx, Termination::LocalTrigger));
            }
        }
        records.push(StepRecord { frontier: step.clone(), evaluation });
    }
    let idx = argmin(&records);
    Ok(finish(SearchMode::Local, sigma_baseline, records, idx, Termination::ExhaustedWithoutTrigger))
}

/// Evaluates every cumulative subset and keeps the smallest sigma.
pub fn exhaustive_search<F>(steps: &[FrontierStep], mut evaluate: F, sigma_baseline: f64) -> Result<SearchTrace>
where
    F: FnMut(&FrontierStep) -> Result<StepEvaluation>,
{
    assert!(!steps.is_empty(), "search needs at least one frontier");
    let records = steps
        .iter()
        .map(|step| Ok(StepRecord { frontier: step.clone(), evaluation: evaluate(step)? }))
        .collect::<Result<Vec<_>>>()?;
    let idx = argmin(&records);
    Ok(finish(SearchMode::Exhaustive, sigma_baseline, records, idx, Termination::Exhaustive))
}
