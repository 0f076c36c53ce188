use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::protocol::multi_run_median;
use super::seeds::RunSeeds;
use super::stats::RunStats;
use super::trainer::{FtAnnTrainer, IdtrTrainer, MsAnnTrainer, Trainer};
use crate::data::{fit_unit_scaler, load_csv, LabeledDataset};
use crate::distances::{compute_distance_table, Metric};
use crate::error::{Error, Result};
use crate::models::{mlp_param_count, ElmConfig};
use crate::pareto::{exhaustive_search, local_search, peel_table, FrontierStep, SearchTrace, StepEvaluation};
use crate::transfer::{msann_param_count, FineTuneConfig, MsAnnConfig, TwoStageBoostConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Idtr,
    Ftann,
    Msann,
    /// AdaBoost.R2 trees on the target only.
    BaselineTree,
    /// The MLP trained from scratch on the target only.
    BaselineMlp,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Idtr => "idtr",
            Method::Ftann => "ftann",
            Method::Msann => "msann",
            Method::BaselineTree => "baseline-tree",
            Method::BaselineMlp => "baseline-mlp",
        }
    }

    fn single_source(self) -> bool {
        matches!(self, Method::Idtr | Method::Ftann)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Local,
    Exhaustive,
    AllSource,
    /// A fixed list of source rows given in `subset`.
    Subset,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Local => "local",
            Mode::Exhaustive => "exhaustive",
            Mode::AllSource => "all-source",
            Mode::Subset => "subset",
        }
    }
}

/// A CSV file of `n_in` input columns followed by `n_out` output columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetRef {
    pub path: PathBuf,
    pub n_in: usize,
    #[serde(default = "one")]
    pub n_out: usize,
    /// Domain label; defaults to the file stem.
    #[serde(default)]
    pub name: Option<String>,
}

fn one() -> usize {
    1
}

fn default_runs() -> usize {
    50
}

fn default_metrics() -> Vec<Metric> {
    Metric::ALL.to_vec()
}

impl DatasetRef {
    pub fn domain_id(&self) -> String {
        self.name.clone().unwrap_or_else(|| {
            self.path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "dataset".into())
        })
    }

    pub fn load(&self) -> Result<LabeledDataset> {
        load_csv(&self.path, self.n_in, self.n_out, &self.domain_id())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub task_id: String,
    pub sources: Vec<DatasetRef>,
    pub target: DatasetRef,
    pub method: Method,
    #[serde(default = "default_metrics")]
    pub metrics: Vec<Metric>,
    pub mode: Mode,
    /// Source rows evaluated in `subset` mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<Vec<usize>>,
    #[serde(default = "default_runs")]
    pub n_runs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub elm: ElmConfig,
    #[serde(default)]
    pub idtr: TwoStageBoostConfig,
    #[serde(default)]
    pub ftann: FineTuneConfig,
    #[serde(default)]
    pub msann: MsAnnConfig,
}

impl TaskSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.task_id.is_empty() {
            return bad("task_id must not be empty");
        }
        if self.n_runs == 0 {
            return bad("n_runs must be at least 1");
        }
        match self.method {
            m if m.single_source() && self.sources.len() != 1 => {
                return Err(Error::Config(format!("{m} takes exactly one source, got {}", self.sources.len())));
            }
            Method::Msann if self.sources.is_empty() => return bad("msann needs at least one source"),
            Method::Msann if self.mode != Mode::AllSource => return bad("msann only supports mode all-source"),
            Method::BaselineTree | Method::BaselineMlp if self.mode != Mode::AllSource => {
                return bad("baseline methods only support mode all-source");
            }
            _ => {}
        }
        if self.method.single_source() && self.metrics.is_empty() {
            return bad("at least one distance metric is required");
        }
        let mut seen = self.metrics.clone();
        seen.sort_by_key(|m| m.name());
        seen.dedup();
        if seen.len() != self.metrics.len() {
            return bad("distance metrics must be distinct");
        }
        if (self.mode == Mode::Subset) != self.subset.is_some() {
            return bad("subset must be given exactly when mode is subset");
        }
        if matches!(&self.subset, Some(s) if s.is_empty()) {
            return bad("subset must not be empty");
        }
        let widths = |d: &DatasetRef| (d.n_in, d.n_out);
        if self.sources.iter().any(|s| widths(s) != widths(&self.target)) {
            return bad("all domains must share n_in and n_out");
        }
        if self.target.n_in == 0 || self.target.n_out == 0 {
            return bad("n_in and n_out must be positive");
        }
        self.idtr.validate()?;
        self.msann.validate()?;
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("task spec serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    fn trainer(&self) -> Box<dyn Trainer> {
        match self.method {
            Method::Idtr | Method::BaselineTree => Box::new(IdtrTrainer(self.idtr)),
            Method::Ftann | Method::BaselineMlp => Box::new(FtAnnTrainer(self.ftann)),
            Method::Msann => Box::new(MsAnnTrainer::new(self.msann)),
        }
    }

    /// Target-only learner of the same family.
    fn baseline_trainer(&self) -> Box<dyn Trainer> {
        match self.method {
            Method::Idtr | Method::BaselineTree => Box::new(IdtrTrainer(self.idtr)),
            _ => Box::new(FtAnnTrainer(self.ftann)),
        }
    }

    fn parameter_count(&self) -> Option<usize> {
        let (n_in, n_out) = (self.target.n_in, self.target.n_out);
        match self.method {
            Method::Ftann | Method::BaselineMlp => Some(mlp_param_count(n_in, n_out)),
            Method::Msann => Some(msann_param_count(n_in, n_out, self.sources.len())),
            _ => None,
        }
    }
}

/// Score of one evaluated source subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetResult {
    /// Frontier step that produced the subset, if it came from peeling.
    pub step: Option<usize>,
    pub subset_size: usize,
    pub indices: Vec<usize>,
    pub stats: RunStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task_id: String,
    pub method: Method,
    pub mode: Mode,
    pub metrics: Vec<Metric>,
    pub seed: u64,
    pub n_runs: usize,
    pub config_digest: String,
    pub source_rows: Vec<usize>,
    pub target_rows: usize,
    pub baseline: RunStats,
    /// Number of peeled frontiers, when the source was peeled.
    pub frontier_count: Option<usize>,
    pub trace: Option<SearchTrace>,
    pub result: SubsetResult,
    /// The full source evaluated at the last frontier step.
    pub all_source: Option<SubsetResult>,
    pub parameter_count: Option<usize>,
    pub warnings: Vec<String>,
}

impl EvalReport {
    pub fn baseline_rmse(&self) -> f64 {
        self.baseline.median
    }
}

/// Loads the referenced files and runs the task.
pub fn run_task(spec: &TaskSpec) -> Result<EvalReport> {
    spec.validate()?;
    let sources = spec.sources.iter().map(DatasetRef::load).collect::<Result<Vec<_>>>()?;
    let target = spec.target.load()?;
    run_loaded(spec, &sources, &target)
}

/// Fits one unit scaler over every domain and applies it; also returns a
/// warning per constant column.
pub fn unit_scale(sources: &[LabeledDataset], target: &LabeledDataset) -> Result<(Vec<LabeledDataset>, LabeledDataset, Vec<String>)> {
    let mut all: Vec<&LabeledDataset> = sources.iter().collect();
    all.push(target);
    let scaler = fit_unit_scaler(&all)?;
    let warnings = scaler
        .degenerate_columns(target)
        .into_iter()
        .map(|c| format!("column `{c}` is constant across all domains and scales to 0"))
        .collect();
    let scaled = sources.iter().map(|s| scaler.apply(s)).collect::<Result<Vec<_>>>()?;
    Ok((scaled, scaler.apply(target)?, warnings))
}

fn subset_result(step: Option<&FrontierStep>, indices: Vec<usize>, stats: RunStats) -> SubsetResult {
    SubsetResult { step: step.map(|s| s.step), subset_size: indices.len(), indices, stats }
}

/// Runs the task on datasets already in memory (unscaled; scaling happens here).
pub fn run_loaded(spec: &TaskSpec, sources: &[LabeledDataset], target: &LabeledDataset) -> Result<EvalReport> {
    spec.validate()?;
    let (sources, target, warnings) = unit_scale(sources, target)?;
    let seeds = |step: usize| RunSeeds { master: spec.seed, task: &spec.task_id, step };
    let baseline = multi_run_median(spec.baseline_trainer().as_ref(), &[], &target, spec.n_runs, &seeds(0))?;
    let trainer = spec.trainer();

    let mut report = EvalReport {
        task_id: spec.task_id.clone(),
        method: spec.method,
        mode: spec.mode,
        metrics: spec.metrics.clone(),
        seed: spec.seed,
        n_runs: spec.n_runs,
        config_digest: spec.digest(),
        source_rows: sources.iter().map(LabeledDataset::n_rows).collect(),
        target_rows: target.n_rows(),
        baseline: baseline.clone(),
        frontier_count: None,
        trace: None,
        result: subset_result(None, Vec::new(), baseline.clone()),
        all_source: None,
        parameter_count: spec.parameter_count(),
        warnings,
    };

    if !spec.method.single_source() {
        if spec.method == Method::Msann {
            report.result = subset_result(
                None,
                Vec::new(),
                multi_run_median(trainer.as_ref(), &sources, &target, spec.n_runs, &seeds(1))?,
            );
        }
        return Ok(report);
    }

    let source = &sources[0];
    let table = compute_distance_table(source, &target, &spec.metrics, &spec.elm)?;
    let frontiers = peel_table(&table)?;
    let k_all = frontiers.len();
    report.frontier_count = Some(k_all);

    let evaluate = |step: &FrontierStep| -> Result<StepEvaluation> {
        let subset = source.select_rows(&step.cumulative)?;
        let stats = multi_run_median(trainer.as_ref(), std::slice::from_ref(&subset), &target, spec.n_runs, &seeds(step.step))?;
        Ok(StepEvaluation { sigma: stats.median, runs: stats.values })
    };
    let from_eval = |step: &FrontierStep, e: &StepEvaluation| {
        subset_result(Some(step), step.cumulative.clone(), RunStats::from_values(e.runs.clone()))
    };

    match spec.mode {
        Mode::Local | Mode::Exhaustive => {
            let trace = if spec.mode == Mode::Local {
                local_search(&frontiers, evaluate, baseline.median)?
            } else {
                exhaustive_search(&frontiers, evaluate, baseline.median)?
            };
            let chosen = trace.chosen();
            report.result = from_eval(&chosen.frontier, &chosen.evaluation);
            let last = &frontiers[k_all - 1];
            report.all_source = Some(match trace.steps.get(k_all - 1) {
                Some(rec) => from_eval(&rec.frontier, &rec.evaluation),
                None => from_eval(last, &evaluate(last)?),
            });
            report.trace = Some(trace);
        }
        Mode::AllSource => {
            let last = &frontiers[k_all - 1];
            let all = from_eval(last, &evaluate(last)?);
            report.result = all.clone();
            report.all_source = Some(all);
        }
        Mode::Subset => {
            let mut indices = spec.subset.clone().expect("validated");
            indices.sort_unstable();
            indices.dedup();
            if let Some(&bad) = indices.iter().find(|&&i| i >= source.n_rows()) {
                return Err(Error::IndexOutOfRange { index: bad, len: source.n_rows() });
            }
            let subset = source.select_rows(&indices)?;
            let stats = multi_run_median(trainer.as_ref(), &[subset], &target, spec.n_runs, &seeds(k_all + 1))?;
            report.result = subset_result(None, indices, stats);
        }
    }
    Ok(report)
}
