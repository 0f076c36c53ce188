//! The `srcsel` command line.
//!
//! Every command reads a JSON config of the form
//!
//! ```json
//! { "task": { ...TaskSpec... }, "output_dir": "out" }
//! ```
//!
//! Relative paths inside the config resolve against the config's own
//! directory. Exit codes: 0 success, 2 config error, 3 data error, 4 numeric
//! failure.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::distances::compute_distance_table;
use crate::error::{Error, ErrorKind, Result};
use crate::evaluation::{render_report, run_task, unit_scale, EvalReport, Mode, ReportFormat, TaskSpec};
use crate::pareto::Termination;
use crate::reproduce::{reproduce, ReproduceOptions, DATA_DIR_ENV, LAYOUT_HINT};

#[derive(Debug, Parser)]
#[command(name = "srcsel", version, about = "Pareto-frontier source data selection for transfer learning")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Override the master seed from the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for evaluation; results do not depend on this.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output directory (overrides `output_dir` in the config).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overwrite existing output files.
    #[arg(long, global = true)]
    pub force: bool,
    /// Override the number of seeded runs per evaluation.
    #[arg(long, global = true)]
    pub runs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the source-to-target distance table as CSV.
    Distances { config: PathBuf },
    /// Peel Pareto frontiers and search for the best cumulative subset.
    Select {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = SearchArg::Exhaustive)]
        mode: SearchArg,
    },
    /// Evaluate all source rows, or the rows listed in an index file.
    Evaluate {
        config: PathBuf,
        /// `all`, or a file of 0-based source row indices.
        #[arg(long, default_value = "all")]
        subset: String,
    },
    /// Run one of the eleven paper tasks on external data.
    Reproduce {
        task: u32,
        #[arg(long, env = DATA_DIR_ENV)]
        data_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SearchArg {
    Local,
    Exhaustive,
}

/// Contents of a config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    pub task: TaskSpec,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl CliConfig {
    /// Parses, resolves relative paths against `path`'s directory, and
    /// validates the task.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        let mut cfg: CliConfig = serde_json::from_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for d in cfg.task.sources.iter_mut().chain([&mut cfg.task.target]) {
            d.path = base.join(&d.path);
        }
        if let Some(dir) = &mut cfg.output_dir {
            *dir = base.join(&*dir);
        }
        cfg.task.validate()?;
        Ok(cfg)
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    if source.kind() == std::io::ErrorKind::NotFound {
        Error::MissingFile(path.to_path_buf())
    } else {
        Error::Io { path: path.to_path_buf(), source }
    }
}

pub fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Config => 2,
        ErrorKind::Data => 3,
        ErrorKind::Numeric => 4,
    }
}

/// Parses `std::env::args` and runs the command.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let (Error::MissingFile(_), Command::Reproduce { .. }) = (&e, &cli.command) {
                eprintln!("hint: {LAYOUT_HINT}");
            }
            ExitCode::from(exit_code(e.kind()))
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = cli.global.jobs {
            if n == 0 {
                return Err(Error::Config("--jobs must be at least 1".into()));
            }
            b = b.num_threads(n);
        }
        b.build().map_err(|e| Error::Config(e.to_string()))?
    };
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Distances { config } => cmd_distances(config, g),
        Command::Select { config, mode } => cmd_select(config, *mode, g),
        Command::Evaluate { config, subset } => cmd_evaluate(config, subset, g),
        Command::Reproduce { task, data_dir } => cmd_reproduce(*task, data_dir.as_deref(), g),
    }
}

/// Where outputs go: `--out`, then the config's `output_dir`, then the
/// config's directory.
fn output_dir(config: &Path, cfg: Option<&CliConfig>, g: &GlobalOpts) -> PathBuf {
    g.out
        .clone()
        .or_else(|| cfg.and_then(|c| c.output_dir.clone()))
        .unwrap_or_else(|| config.parent().unwrap_or(Path::new(".")).to_path_buf())
}

/// Writes every file or none: all targets are checked before the first write.
fn write_outputs(dir: &Path, files: &[(String, String)], force: bool) -> Result<()> {
    if !force {
        if let Some((name, _)) = files.iter().find(|(name, _)| dir.join(name).exists()) {
            return Err(Error::Config(format!(
                "{} already exists; pass --force to overwrite",
                dir.join(name).display()
            )));
        }
    }
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    for (name, body) in files {
        let p = dir.join(name);
        fs::write(&p, body).map_err(|e| io_error(&p, e))?;
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn load_config(path: &Path, g: &GlobalOpts) -> Result<CliConfig> {
    let mut cfg = CliConfig::load(path)?;
    if let Some(seed) = g.seed {
        cfg.task.seed = seed;
    }
    if let Some(runs) = g.runs {
        cfg.task.n_runs = runs;
    }
    Ok(cfg)
}

fn warn(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

pub fn cmd_distances(config: &Path, g: &GlobalOpts) -> Result<()> {
    let cfg = load_config(config, g)?;
    let spec = &cfg.task;
    if spec.sources.len() != 1 {
        return Err(Error::Config("distances needs exactly one source".into()));
    }
    let (sources, target, warnings) = unit_scale(&[spec.sources[0].load()?], &spec.target.load()?)?;
    warn(&warnings);
    let table = compute_distance_table(&sources[0], &target, &spec.metrics, &spec.elm)?;
    write_outputs(&output_dir(config, Some(&cfg), g), &[("distances.csv".into(), table.to_csv()?)], g.force)
}

fn report_files(report: &EvalReport) -> Result<Vec<(String, String)>> {
    Ok(vec![
        ("report.json".into(), render_report(report, ReportFormat::Json)?),
        ("report.csv".into(), render_report(report, ReportFormat::Csv)?),
    ])
}

fn finish(config: &Path, cfg: &CliConfig, report: &EvalReport, g: &GlobalOpts) -> Result<()> {
    warn(&report.warnings);
    write_outputs(&output_dir(config, Some(cfg), g), &report_files(report)?, g.force)
}

/// The per-step table printed by `select`.
pub fn step_table(report: &EvalReport) -> String {
    let mut out = format!("baseline median RMSE {:.6}\n", report.baseline_rmse());
    out.push_str("k\tfrontier_size\tcumulative_size\tsigma\n");
    if let Some(trace) = &report.trace {
        for rec in &trace.steps {
            let f = &rec.frontier;
            out.push_str(&format!("{}\t{}\t{}\t{:.6}\n", f.step, f.selected.len(), f.cumulative.len(), rec.evaluation.sigma));
        }
        out.push_str(&format!(
            "chosen step {} ({} rows, median RMSE {:.6}, {})\n",
            trace.chosen_step,
            trace.chosen_subset.len(),
            trace.chosen_sigma(),
            match trace.termination {
                Termination::LocalTrigger => "local optimum",
                Termination::ExhaustedWithoutTrigger => "no local optimum, best step",
                Termination::Exhaustive => "exhaustive",
            }
        ));
    }
    out
}

pub fn cmd_select(config: &Path, mode: SearchArg, g: &GlobalOpts) -> Result<()> {
    let mut cfg = load_config(config, g)?;
    cfg.task.mode = match mode {
        SearchArg::Local => Mode::Local,
        SearchArg::Exhaustive => Mode::Exhaustive,
    };
    cfg.task.subset = None;
    let report = run_task(&cfg.task)?;
    print!("{}", step_table(&report));
    finish(config, &cfg, &report, g)
}

/// Reads 0-based indices separated by commas or whitespace.
pub fn parse_index_file(path: &Path) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let indices = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|_| Error::InvalidDataset(format!("bad index `{t}` in {}", path.display()))))
        .collect::<Result<Vec<_>>>()?;
    if indices.is_empty() {
        return Err(Error::InvalidDataset(format!("{} lists no indices", path.display())));
    }
    Ok(indices)
}

pub fn cmd_evaluate(config: &Path, subset: &str, g: &GlobalOpts) -> Result<()> {
    let mut cfg = load_config(config, g)?;
    if subset == "all" {
        cfg.task.mode = Mode::AllSource;
        cfg.task.subset = None;
    } else {
        cfg.task.mode = Mode::Subset;
        cfg.task.subset = Some(parse_index_file(Path::new(subset))?);
    }
    let report = run_task(&cfg.task)?;
    let r = &report.result;
    println!("subset_size\tmedian_rmse\tbaseline_rmse");
    println!("{}\t{:.6}\t{:.6}", r.subset_size, r.stats.median, report.baseline_rmse());
    if let Some(p) = report.parameter_count {
        println!("parameters\t{p}");
    }
    finish(config, &cfg, &report, g)
}

pub fn cmd_reproduce(task: u32, data_dir: Option<&Path>, g: &GlobalOpts) -> Result<()> {
    crate::reproduce::paper_task(task)?;
    let data_dir = data_dir
        .ok_or_else(|| Error::MissingFile(PathBuf::from(format!("<data directory: pass --data-dir or set {DATA_DIR_ENV}>"))))?
        .to_path_buf();
    let opts = ReproduceOptions { data_dir, seed: g.seed.unwrap_or(0), n_runs: g.runs.unwrap_or(50) };
    let rep = reproduce(task, &opts)?;
    let mut files = Vec::new();
    let mut stdout = std::io::stdout().lock();
    for t in &rep.tables {
        let _ = writeln!(stdout, "{}", t.to_text());
        files.push((format!("{}.csv", t.name), t.to_csv()?));
    }
    let reports: serde_json::Map<String, serde_json::Value> = rep
        .reports
        .iter()
        .map(|(k, r)| Ok((k.clone(), serde_json::to_value(r)?)))
        .collect::<Result<_>>()?;
    if !reports.is_empty() {
        files.push(("reports.json".into(), serde_json::to_string_pretty(&reports)? + "\n"));
    }
    let dir = g.out.clone().unwrap_or_else(|| PathBuf::from(format!("reproduce_task{task}")));
    write_outputs(&dir, &files, g.force)
}
