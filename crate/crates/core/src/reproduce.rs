//! The paper's task catalog on user-supplied data, with results laid out like
//! the published tables.
//!
//! Expected layout under the data directory (one header row per file):
//!
//! ```text
//! melt_pool/ded_lbp.csv              PFR (g/min), SS (mm/min), LP (W), width
//! melt_pool/ded_lbw.csv              WFR (m/min), TS (mm/s), LP (W), EP (W), width
//! relative_density/slm_125_hl.csv    laser power, speed, hatch spacing, energy density, density
//! relative_density/slm_250_hl.csv    (same columns)
//! relative_density/eos_m270.csv
//! relative_density/slm.csv
//! relative_density/concept_laser_m2.csv
//! relative_density/concept_laser_m3.csv
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::data::{derive_common_features, load_csv, LabeledDataset, ProcessFeatureRow, ProcessKind};
use crate::distances::{base_transferability_score, Metric};
use crate::error::{Error, Result};
use crate::evaluation::{
    multi_run_median, run_loaded, unit_scale, DatasetRef, EvalReport, Method, Mode, MsAnnTrainer, RunSeeds, TaskSpec,
};
use crate::models::{mlp_param_count, ElmConfig};
use crate::pareto::{local_search, SearchTrace};
use crate::transfer::{msann_param_count, FineTuneConfig, MsAnnConfig, TwoStageBoostConfig};

/// Environment variable that points at the data directory.
pub const DATA_DIR_ENV: &str = "SRCSEL_DATA_DIR";

pub const LAYOUT_HINT: &str = "expected melt_pool/{ded_lbp,ded_lbw}.csv and \
relative_density/{slm_125_hl,slm_250_hl,eos_m270,slm,concept_laser_m2,concept_laser_m3}.csv \
under the data directory; the melt pool data is from Akhavan et al. (2023) and Dehaghani et al. (2023), \
the relative density data from Liu et al. (2021)";

const SS316L_DENSITY: f64 = 7.98;
const DSS2209_DENSITY: f64 = 7.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Machine {
    Slm125Hl,
    Slm250Hl,
    EosM270,
    Slm,
    ConceptLaserM2,
    ConceptLaserM3,
}

impl Machine {
    pub const SOURCES: [Machine; 4] = [Machine::Slm250Hl, Machine::Slm125Hl, Machine::EosM270, Machine::ConceptLaserM2];

    pub fn file_stem(self) -> &'static str {
        match self {
            Machine::Slm125Hl => "slm_125_hl",
            Machine::Slm250Hl => "slm_250_hl",
            Machine::EosM270 => "eos_m270",
            Machine::Slm => "slm",
            Machine::ConceptLaserM2 => "concept_laser_m2",
            Machine::ConceptLaserM3 => "concept_laser_m3",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Machine::Slm125Hl => "SLM 125 HL",
            Machine::Slm250Hl => "SLM 250 HL",
            Machine::EosM270 => "EOS M270",
            Machine::Slm => "SLM",
            Machine::ConceptLaserM2 => "Concept Laser M2",
            Machine::ConceptLaserM3 => "Concept Laser M3",
        }
    }

    fn path(self, dir: &Path) -> PathBuf {
        dir.join("relative_density").join(format!("{}.csv", self.file_stem()))
    }
}

/// One entry of the task catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PaperTask {
    /// Blown-powder deposition as source, hot-wire deposition as target.
    MeltPool,
    SingleMachine { source: Machine, target: Machine },
    MultiMachine { target: Machine },
}

pub fn paper_task(id: u32) -> Result<PaperTask> {
    let s = Machine::SOURCES;
    Ok(match id {
        1 => PaperTask::MeltPool,
        2..=5 => PaperTask::SingleMachine { source: s[id as usize - 2], target: Machine::Slm },
        6..=9 => PaperTask::SingleMachine { source: s[id as usize - 6], target: Machine::ConceptLaserM3 },
        10 => PaperTask::MultiMachine { target: Machine::Slm },
        11 => PaperTask::MultiMachine { target: Machine::ConceptLaserM3 },
        _ => return Err(Error::Config(format!("unknown task id {id}; tasks are numbered 1 to 11"))),
    })
}

#[derive(Debug, Clone)]
pub struct ReproduceOptions {
    pub data_dir: PathBuf,
    pub seed: u64,
    pub n_runs: usize,
}

/// A rendered result table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File-friendly name such as `table7`.
    pub name: String,
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Column-aligned plain text.
    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut out = format!("{}\n", self.title);
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            padded.join("  ").trim_end().to_string()
        };
        let _ = writeln!(out, "{}", line(&self.header));
        let _ = writeln!(out, "{}", widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
        for r in &self.rows {
            let _ = writeln!(out, "{}", line(r));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Reproduction {
    pub task: u32,
    pub tables: Vec<Table>,
    /// Full reports behind the tables, keyed by a short label.
    pub reports: Vec<(String, EvalReport)>,
}

fn require(path: PathBuf) -> Result<PathBuf> {
    if path.exists() {
        Ok(path)
    } else {
        Err(Error::MissingFile(path))
    }
}

fn deposition_dataset(path: &Path, kind: ProcessKind) -> Result<LabeledDataset> {
    let (n_in, density) = match kind {
        ProcessKind::BlownPowder => (3, SS316L_DENSITY),
        ProcessKind::HotWire => (4, DSS2209_DENSITY),
    };
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let raw = load_csv(path, n_in, 1, &stem)?;
    let x = raw.inputs();
    let mut feats = Vec::with_capacity(raw.n_rows() * 3);
    for r in 0..raw.n_rows() {
        let row = ProcessFeatureRow {
            kind,
            feed_rate: x[(r, 0)],
            speed: x[(r, 1)],
            laser_power: x[(r, 2)],
            electrical_power: if n_in == 4 { x[(r, 3)] } else { 0.0 },
            density,
        };
        let f = derive_common_features(&row)?;
        feats.extend([f.mfr, f.ts, f.ed]);
    }
    LabeledDataset::new(
        stem,
        crate::Matrix::from_row_slice(raw.n_rows(), 3, &feats),
        raw.outputs().clone(),
        vec!["MFR".into(), "TS".into(), "ED".into()],
        raw.output_names().to_vec(),
    )
}

fn machine_dataset(dir: &Path, m: Machine) -> Result<LabeledDataset> {
    load_csv(require(m.path(dir))?, 4, 1, m.file_stem())
}

/// Checks that every file a task needs exists, without reading them.
pub fn check_data(id: u32, dir: &Path) -> Result<()> {
    if !dir.is_dir() {
        return Err(Error::MissingFile(dir.to_path_buf()));
    }
    match paper_task(id)? {
        PaperTask::MeltPool => {
            require(dir.join("melt_pool/ded_lbp.csv"))?;
            require(dir.join("melt_pool/ded_lbw.csv"))?;
        }
        PaperTask::SingleMachine { source, target } => {
            require(source.path(dir))?;
            require(target.path(dir))?;
        }
        PaperTask::MultiMachine { target } => {
            for m in Machine::SOURCES.iter().chain([&target]) {
                require(m.path(dir))?;
            }
        }
    }
    Ok(())
}

/// Distance combinations in the order of the melt-pool tables.
pub fn metric_combinations() -> Vec<Vec<Metric>> {
    use Metric::*;
    vec![
        vec![Euclidean, Cosine],
        vec![Performance, Feature],
        vec![Euclidean, Performance],
        vec![Euclidean, Feature],
        vec![Cosine, Performance],
        vec![Cosine, Feature],
        vec![Euclidean, Cosine, Performance],
        vec![Euclidean, Cosine, Feature],
        vec![Euclidean, Performance, Feature],
        vec![Cosine, Performance, Feature],
        vec![Euclidean, Cosine, Performance, Feature],
    ]
}

/// Source combinations in the order of the multi-source table.
pub fn source_combinations() -> Vec<Vec<Machine>> {
    let [a, b, c, d] = Machine::SOURCES;
    vec![
        vec![a, b, c, d],
        vec![a, b, c],
        vec![a, b, d],
        vec![a, c, d],
        vec![b, c, d],
        vec![a, b],
        vec![a, c],
        vec![a, d],
        vec![b, c],
        vec![b, d],
        vec![c, d],
    ]
}

/// Local search replayed over the per-step scores of an exhaustive trace.
/// Seeds depend only on the step, so this equals a fresh local run.
pub fn local_from_exhaustive(trace: &SearchTrace) -> Result<SearchTrace> {
    let frontiers: Vec<_> = trace.steps.iter().map(|r| r.frontier.clone()).collect();
    local_search(&frontiers, |s| Ok(trace.steps[s.step - 1].evaluation.clone()), trace.sigma_baseline)
}

fn fmt_rmse(v: f64) -> String {
    format!("{v:.4}")
}

fn step_cell(step: usize, size: usize) -> String {
    format!("{step} ({size})")
}

fn search_header(first: &[&str]) -> Vec<String> {
    first
        .iter()
        .map(|s| s.to_string())
        .chain(
            [
                "local median RMSE",
                "local step (# source)",
                "exhaustive median RMSE",
                "exhaustive step (# source)",
                "all-source median RMSE",
                "all-source step (# source)",
            ]
            .map(String::from),
        )
        .collect()
}

fn search_cells(report: &EvalReport) -> Result<Vec<String>> {
    let trace = report.trace.as_ref().expect("exhaustive report has a trace");
    let local = local_from_exhaustive(trace)?;
    let all = report.all_source.as_ref().expect("exhaustive report has the all-source step");
    Ok(vec![
        fmt_rmse(local.chosen_sigma()),
        step_cell(local.chosen_step, local.chosen_subset.len()),
        fmt_rmse(trace.chosen_sigma()),
        step_cell(trace.chosen_step, trace.chosen_subset.len()),
        fmt_rmse(all.stats.median),
        step_cell(all.step.unwrap_or(0), all.subset_size),
    ])
}

fn metric_label(metrics: &[Metric]) -> String {
    metrics.iter().map(|m| m.name()).collect::<Vec<_>>().join("+")
}

fn base_spec(task_id: String, source: DatasetRef, target: DatasetRef, method: Method, metrics: Vec<Metric>, opts: &ReproduceOptions) -> TaskSpec {
    TaskSpec {
        task_id,
        sources: vec![source],
        target,
        method,
        metrics,
        mode: Mode::Exhaustive,
        subset: None,
        n_runs: opts.n_runs,
        seed: opts.seed,
        elm: ElmConfig::default(),
        idtr: TwoStageBoostConfig::default(),
        ftann: FineTuneConfig::default(),
        msann: MsAnnConfig::default(),
    }
}

fn dataset_ref(path: PathBuf, n_in: usize, name: &str) -> DatasetRef {
    DatasetRef { path, n_in, n_out: 1, name: Some(name.to_string()) }
}

/// Runs one task of the catalog end to end.
pub fn reproduce(id: u32, opts: &ReproduceOptions) -> Result<Reproduction> {
    let task = paper_task(id)?;
    check_data(id, &opts.data_dir)?;
    let dir = &opts.data_dir;
    let mut tables = Vec::new();
    let mut reports = Vec::new();
    match task {
        PaperTask::MeltPool => {
            let sp = dir.join("melt_pool/ded_lbp.csv");
            let tp = dir.join("melt_pool/ded_lbw.csv");
            let source = deposition_dataset(&sp, ProcessKind::BlownPowder)?;
            let target = deposition_dataset(&tp, ProcessKind::HotWire)?;
            for (method, name) in [(Method::Idtr, "table7"), (Method::Ftann, "table8")] {
                let mut rows = Vec::new();
                for metrics in metric_combinations() {
                    let spec = base_spec(
                        format!("task{id}"),
                        dataset_ref(sp.clone(), 3, "DED-LB/p"),
                        dataset_ref(tp.clone(), 3, "DED-LB/w"),
                        method,
                        metrics.clone(),
                        opts,
                    );
                    let report = run_loaded(&spec, std::slice::from_ref(&source), &target)?;
                    let mut row = vec![metric_label(&metrics)];
                    row.extend(search_cells(&report)?);
                    rows.push(row);
                    reports.push((format!("{method}_{}", metric_label(&metrics)), report));
                }
                tables.push(Table {
                    name: name.into(),
                    title: format!("Task {id}: {} with different distance metrics", method_title(method)),
                    header: search_header(&["distances"]),
                    rows,
                });
            }
        }
        PaperTask::SingleMachine { source, target } => {
            let s = machine_dataset(dir, source)?;
            let t = machine_dataset(dir, target)?;
            let mut rows = Vec::new();
            for method in [Method::Idtr, Method::Ftann] {
                let spec = base_spec(
                    format!("task{id}"),
                    dataset_ref(source.path(dir), 4, source.label()),
                    dataset_ref(target.path(dir), 4, target.label()),
                    method,
                    vec![Metric::Euclidean, Metric::Performance],
                    opts,
                );
                let report = run_loaded(&spec, std::slice::from_ref(&s), &t)?;
                let mut row = vec![method_title(method).to_string(), source.label().to_string()];
                row.extend(search_cells(&report)?);
                rows.push(row);
                reports.push((method.to_string(), report));
            }
            let name = if target == Machine::Slm { "table9" } else { "table10" };
            tables.push(Table {
                name: name.into(),
                title: format!("Task {id}: target {} with euclidean+performance distances", target.label()),
                header: search_header(&["target model", "source"]),
                rows,
            });
        }
        PaperTask::MultiMachine { target } => {
            multi_source(id, target, opts, &mut tables)?;
        }
    }
    Ok(Reproduction { task: id, tables, reports })
}

fn method_title(m: Method) -> &'static str {
    match m {
        Method::Idtr => "I-DTR",
        Method::Ftann => "FT-ANN",
        Method::Msann => "MS-ANN",
        Method::BaselineTree => "AdaBoost.R2 baseline",
        Method::BaselineMlp => "MLP baseline",
    }
}

const CHECKPOINTS: [usize; 3] = [50, 100, 150];

fn multi_source(id: u32, target: Machine, opts: &ReproduceOptions, tables: &mut Vec<Table>) -> Result<()> {
    let dir = &opts.data_dir;
    let t_raw = machine_dataset(dir, target)?;
    let cfg = MsAnnConfig::default();
    let task_id = format!("task{id}");
    let mut rows = Vec::new();
    let mut by_count: Vec<(usize, f64)> = Vec::new();
    for combo in source_combinations() {
        let raw = combo.iter().map(|&m| machine_dataset(dir, m)).collect::<Result<Vec<_>>>()?;
        let (sources, t, _) = unit_scale(&raw, &t_raw)?;
        let mut row = vec![combo.iter().map(|m| m.label()).collect::<Vec<_>>().join(", ")];
        for epochs in CHECKPOINTS {
            let trainer = MsAnnTrainer { config: MsAnnConfig { epoch_max: *CHECKPOINTS.last().unwrap(), ..cfg }, epochs };
            let seeds = RunSeeds { master: opts.seed, task: &task_id, step: 1 };
            let stats = multi_run_median(&trainer, &sources, &t, opts.n_runs, &seeds)?;
            row.push(fmt_rmse(stats.median));
            if epochs == 150 {
                by_count.push((combo.len(), stats.median));
            }
        }
        rows.push(row);
    }
    tables.push(Table {
        name: "table11".into(),
        title: format!("Task {id}: MS-ANN on target {} by training epochs", target.label()),
        header: ["sources", "50 epochs", "100 epochs", "150 epochs"].map(String::from).to_vec(),
        rows,
    });

    let base = mlp_param_count(4, 1);
    let mut rows = vec![vec!["FT-ANN (N = 1)".to_string(), "see tasks 2-9".into(), base.to_string()]];
    for n in 2..=4 {
        let meds: Vec<f64> = by_count.iter().filter(|(k, _)| *k == n).map(|(_, v)| *v).collect();
        let lo = meds.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = meds.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let range = if meds.len() == 1 { fmt_rmse(lo) } else { format!("[{}, {}]", fmt_rmse(lo), fmt_rmse(hi)) };
        let count = msann_param_count(4, 1, n);
        let pct = (count as f64 / base as f64 - 1.0) * 100.0;
        rows.push(vec![format!("MS-ANN (N = {n})"), range, format!("{count} (+{pct:.2}%)")]);
    }
    tables.push(Table {
        name: "table12".into(),
        title: format!("Task {id}: median RMSE range at 150 epochs and parameter counts (n_in = 4, n_out = 1)"),
        header: ["model", &format!("median RMSE on {}", target.label()), "parameters"].map(String::from).to_vec(),
        rows,
    });

    let mut rows = Vec::new();
    for m in Machine::SOURCES {
        let (s, t, _) = unit_scale(&[machine_dataset(dir, m)?], &t_raw)?;
        rows.push(vec![m.label().to_string(), format!("{:.4}", base_transferability_score(&s[0], &t, &ElmConfig::default())?)]);
    }
    tables.push(Table {
        name: "transferability".into(),
        title: format!("Task {id}: target error of an ELM trained on each whole source ({})", target.label()),
        header: ["source", "base distance"].map(String::from).to_vec(),
        rows,
    });
    Ok(())
}
