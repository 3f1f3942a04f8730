//! `driftbench`: generate, induce, run and sweep from the command line.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 runtime error.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use driftbench::classifiers::{EnsembleConfig, ModelConfig, Penalty, TreeConfig};
use driftbench::data::{load_csv, save_csv, Dataset, Label, LabelColumn};
use driftbench::harness::{
    margin_width_sweep, run_stream, run_suite, sensitivity_sweep, table8_sweep, write_report_json,
    write_summary_csv, write_trace_csv, DetectorKind, RunConfig, TABLE8_REPEATS,
};
use driftbench::induction::{induce, rotate_features, InductionMode, InductionPlan, DEFAULT_BINS};
use driftbench::synth::{generate_scenario, ScenarioId};
use driftbench::Error;

#[derive(Parser, Debug)]
#[command(name = "driftbench", version, about = "Margin density drift detection benchmarks")]
struct Cli {
    /// Root seed; every random draw derives from it.
    #[arg(long, global = true, env = "DRIFTBENCH_SEED", default_value_t = 0)]
    seed: u64,
    /// Overwrite existing output files.
    #[arg(long, global = true)]
    force: bool,
    /// Worker threads for parallel runs (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic scenario as CSV.
    Synth {
        /// a0..a4, b0, b1, c0, c1 or hd20:<i>.
        #[arg(long)]
        scenario: String,
        /// Samples per class.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rotate ranked features of one class after a change point.
    Induce(InduceArgs),
    /// Run detectors over labeled streams.
    Run(RunArgs),
    /// Parameter sweeps and the HD20 relevance table.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Name or 0-based index of the label column.
    #[arg(long, default_value = "class")]
    label_column: String,
    /// Label value read as class +1; the other value is −1.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    positive_label: String,
}

impl InputArgs {
    fn load(&self, path: &Path) -> driftbench::Result<Dataset> {
        let column: LabelColumn = self.label_column.parse().unwrap_or_else(|e| match e {});
        load_csv(path, Some(&column), &self.positive_label)
    }
}

#[derive(Args, Debug)]
struct InduceArgs {
    #[arg(long = "in", alias = "input")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Where to write the plan; `<out>.plan.json` by default.
    #[arg(long)]
    plan_out: Option<PathBuf>,
    /// Replay a saved plan instead of ranking.
    #[arg(long, conflicts_with_all = ["mode", "fraction", "change_point", "class", "bins"])]
    plan: Option<PathBuf>,
    #[arg(long, default_value = "top")]
    mode: String,
    #[arg(long, default_value_t = 0.25)]
    fraction: f64,
    #[arg(long, default_value_t = 0.5)]
    change_point: f64,
    /// Class whose features are rotated: -1 or 1.
    #[arg(long, default_value = "-1", allow_hyphen_values = true)]
    class: String,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    #[command(flatten)]
    input_args: InputArgs,
}

#[derive(Serialize, Deserialize)]
struct PlanFile {
    #[serde(flatten)]
    plan: InductionPlan,
    seed: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModelChoice {
    Svm,
    LogisticL2,
    LogisticL1,
    Tree,
    Rs,
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Prediction model.
    #[arg(long, value_enum, default_value = "svm")]
    model: ModelChoice,
    /// Detection model for md3-rs and uncertainty; a random-subspace
    /// ensemble when omitted.
    #[arg(long, value_enum)]
    detection_model: Option<ModelChoice>,
    /// SVM regularization C.
    #[arg(long, default_value_t = 1.0)]
    svm_c: f64,
    /// Logistic penalty strength.
    #[arg(long, default_value_t = 0.01)]
    strength: f64,
    /// Chunk size N.
    #[arg(long, default_value_t = 100)]
    chunk: usize,
    /// Labels per suspicion; N when omitted.
    #[arg(long)]
    n_train: Option<usize>,
    #[arg(long, default_value_t = 2.0)]
    theta: f64,
    #[arg(long, default_value_t = 0.5)]
    theta_margin: f64,
    #[arg(long, default_value_t = 0.15)]
    initial_fraction: f64,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 1e-3)]
    epsilon_sigma: f64,
    /// CUSUM/PHT allowance.
    #[arg(long, default_value_t = 0.005)]
    allowance: f64,
    /// CUSUM/PHT alarm threshold.
    #[arg(long, default_value_t = 10.0)]
    cumulative_threshold: f64,
}

impl ModelArgs {
    fn model_config(&self, choice: ModelChoice) -> ModelConfig {
        match choice {
            ModelChoice::Svm => ModelConfig::LinearSvm { c: self.svm_c },
            ModelChoice::LogisticL2 => ModelConfig::Logistic {
                penalty: Penalty::L2,
                strength: self.strength,
            },
            ModelChoice::LogisticL1 => ModelConfig::Logistic {
                penalty: Penalty::L1,
                strength: self.strength,
            },
            ModelChoice::Tree => ModelConfig::Tree(TreeConfig::default()),
            ModelChoice::Rs => ModelConfig::Subspace(EnsembleConfig::default()),
        }
    }

    fn config(&self, detector: DetectorKind, seed: u64) -> driftbench::Result<RunConfig> {
        let cfg = RunConfig {
            prediction: self.model_config(self.model),
            detection: self.detection_model.map(|m| self.model_config(m)),
            n_train: self.n_train,
            theta: self.theta,
            theta_margin: self.theta_margin,
            initial_fraction: self.initial_fraction,
            folds: self.folds,
            epsilon_sigma: self.epsilon_sigma,
            allowance: self.allowance,
            cumulative_threshold: self.cumulative_threshold,
            ..RunConfig::new(detector, self.chunk, seed)
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Labeled stream(s). More than one requires --suite.
    #[arg(long = "in", alias = "input", required = true, num_args = 1..)]
    inputs: Vec<PathBuf>,
    /// Detector(s), comma separated. More than one requires --suite.
    #[arg(long, value_delimiter = ',', default_value = "md3-svm")]
    detector: Vec<String>,
    /// Run the cross product and write summary.csv plus one directory per run.
    #[arg(long)]
    suite: bool,
    /// Extra seeds for --suite, comma separated; the root seed when omitted.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    input_args: InputArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SweepKind {
    Table8,
    MarginWidth,
    Sensitivity,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_enum)]
    kind: SweepKind,
    /// Labeled stream for margin-width and sensitivity sweeps.
    #[arg(long = "in", alias = "input")]
    input: Option<PathBuf>,
    /// Swept values, comma separated.
    #[arg(long, value_delimiter = ',')]
    values: Vec<f64>,
    #[arg(long, default_value = "md3-rs")]
    detector: String,
    /// Samples per class for table8.
    #[arg(long, default_value_t = 500)]
    n: usize,
    /// Independent repeats for table8.
    #[arg(long, default_value_t = TABLE8_REPEATS)]
    repeats: usize,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    input_args: InputArgs,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

fn parse_label(s: &str) -> driftbench::Result<Label> {
    match s.trim() {
        "1" | "+1" => Ok(Label::Positive),
        "-1" => Ok(Label::Negative),
        other => Err(usage(format!("class must be -1 or 1, got {other:?}"))),
    }
}

fn parse_detector(s: &str) -> driftbench::Result<DetectorKind> {
    s.parse()
}

/// Refuses to clobber existing files unless `--force` is set.
fn check_writable(paths: &[&Path], force: bool) -> driftbench::Result<()> {
    for p in paths {
        if p.exists() && !force {
            return Err(usage(format!("{} exists; pass --force to overwrite", p.display())));
        }
    }
    Ok(())
}

fn create(path: &Path) -> driftbench::Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| io_error(path, e))
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn finish(mut w: BufWriter<File>, path: &Path) -> driftbench::Result<()> {
    w.flush().map_err(|e| io_error(path, e))
}

fn cmd_synth(scenario: &str, n: usize, out: &Path, cli: &Cli) -> driftbench::Result<()> {
    let id: ScenarioId = scenario.parse()?;
    check_writable(&[out], cli.force)?;
    let data = generate_scenario(id, n, cli.seed)?;
    save_csv(&data, out)
}

fn cmd_induce(a: &InduceArgs, cli: &Cli) -> driftbench::Result<()> {
    let plan_out = a.plan_out.clone().unwrap_or_else(|| {
        let mut s = a.out.clone().into_os_string();
        s.push(".plan.json");
        PathBuf::from(s)
    });
    let replay = match &a.plan {
        Some(p) => {
            let file = File::open(p).map_err(|e| io_error(p, e))?;
            Some(serde_json::from_reader::<_, PlanFile>(std::io::BufReader::new(file))?.plan)
        }
        None => {
            if !(a.fraction > 0.0 && a.fraction <= 1.0) {
                return Err(usage(format!("fraction must lie in (0, 1], got {}", a.fraction)));
            }
            if !(a.change_point > 0.0 && a.change_point < 1.0) {
                return Err(usage(format!("change point must lie in (0, 1), got {}", a.change_point)));
            }
            None
        }
    };
    let mode: InductionMode = a.mode.parse()?;
    let class = parse_label(&a.class)?;
    check_writable(&[&a.out, &plan_out], cli.force)?;
    let data = a.input_args.load(&a.input)?;
    let (induced, plan) = match replay {
        Some(plan) => {
            plan.validate(data.dim())?;
            (rotate_features(&data, &plan)?, plan)
        }
        None => induce(&data, mode, a.fraction, a.change_point, class, a.bins)?,
    };
    save_csv(&induced, &a.out)?;
    let mut w = create(&plan_out)?;
    serde_json::to_writer_pretty(&mut w, &PlanFile { plan, seed: cli.seed })?;
    writeln!(w).map_err(|e| io_error(&plan_out, e))?;
    finish(w, &plan_out)
}

fn write_run(dir: &Path, report: &driftbench::harness::RunReport) -> driftbench::Result<()> {
    let trace = dir.join("trace.csv");
    let w = create(&trace)?;
    write_trace_csv(&report.trace, w)?;
    let json = dir.join("report.json");
    let mut w = create(&json)?;
    write_report_json(report, &mut w)?;
    finish(w, &json)
}

fn dataset_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "data".into())
}

fn cmd_run(a: &RunArgs, cli: &Cli) -> driftbench::Result<()> {
    let detectors = a.detector.iter().map(|d| parse_detector(d)).collect::<driftbench::Result<Vec<_>>>()?;
    let base = a.model.config(detectors[0], cli.seed)?;
    if !a.suite {
        if a.inputs.len() > 1 || detectors.len() > 1 || !a.seeds.is_empty() {
            return Err(usage("several inputs, detectors or seeds need --suite"));
        }
        let (trace, json) = (a.out_dir.join("trace.csv"), a.out_dir.join("report.json"));
        check_writable(&[&trace, &json], cli.force)?;
        let data = a.input_args.load(&a.inputs[0])?;
        let report = run_stream(&data, &base)?;
        return write_run(&a.out_dir, &report);
    }
    let seeds = if a.seeds.is_empty() { vec![cli.seed] } else { a.seeds.clone() };
    let summary = a.out_dir.join("summary.csv");
    check_writable(&[&summary], cli.force)?;
    let datasets = a
        .inputs
        .iter()
        .map(|p| Ok((dataset_name(p), a.input_args.load(p)?)))
        .collect::<driftbench::Result<Vec<_>>>()?;
    let results = run_suite(&datasets, &detectors, &seeds, &base)?;
    for (row, report) in &results {
        let dir = a.out_dir.join(format!("{}__{}__{}", row.dataset, row.detector, row.seed));
        check_writable(&[&dir.join("trace.csv"), &dir.join("report.json")], cli.force)?;
        write_run(&dir, report)?;
    }
    let rows: Vec<_> = results.into_iter().map(|(row, _)| row).collect();
    let w = create(&summary)?;
    write_summary_csv(&rows, w)
}

fn cmd_sweep(a: &SweepArgs, cli: &Cli) -> driftbench::Result<()> {
    let summary = a.out_dir.join("summary.csv");
    match a.kind {
        SweepKind::Table8 => {
            check_writable(&[&summary], cli.force)?;
            let (rows, _) = table8_sweep(a.n, cli.seed, a.repeats)?;
            write_summary_csv(&rows, create(&summary)?)
        }
        SweepKind::MarginWidth | SweepKind::Sensitivity => {
            let input = a.input.as_ref().ok_or_else(|| usage("this sweep needs --in"))?;
            if a.values.is_empty() {
                return Err(usage("this sweep needs --values"));
            }
            let base = a.model.config(parse_detector(&a.detector)?, cli.seed)?;
            check_writable(&[&summary], cli.force)?;
            let data = a.input_args.load(input)?;
            let rows = match a.kind {
                SweepKind::MarginWidth => margin_width_sweep(&data, &base, &a.values)?,
                _ => sensitivity_sweep(&data, &base, &a.values)?,
            };
            write_summary_csv(&rows, create(&summary)?)
        }
    }
}

fn run(cli: &Cli) -> driftbench::Result<()> {
    if cli.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
            .map_err(|e| Error::State(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Synth { scenario, n, out } => cmd_synth(scenario, *n, out, cli),
        Command::Induce(a) => cmd_induce(a, cli),
        Command::Run(a) => cmd_run(a, cli),
        Command::Sweep(a) => cmd_sweep(a, cli),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match &e {
                Error::Parameter(_) | Error::Index { .. } => 2,
                e if e.is_data_error() => 3,
                _ => 4,
            })
        }
    }
}
