//! `repute`: command line front end for the reputation engine.
//!
//! Subcommands: `compute` scores a log, `baseline` runs the comparison
//! models, `attack` measures robustness under vote injection, `synth`
//! generates datasets, and `report` summarizes result files.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error. Every run writes a
//! manifest describing inputs, configuration, and timings; the result files
//! themselves are byte-stable for a given input and configuration.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use repute_core::attack::{
    generate_synthetic, run_experiment, AttackSpec, ExperimentOptions, InjectionBudget,
    ModelKind, SynthSpec,
};
use repute_core::baselines::{adaptive_average, normal_averages, AdaptiveParams, BaselineModel};
use repute_core::config::{CreditFn, EngineConfig, IntervalWidth};
use repute_core::fairness::{ConsensusMode, FairnessMode};
use repute_core::graph::build_graph;
use repute_core::ingest::{
    self, drop_self_votes, max_label, Dialect, Evaluation, IngestOutcome,
};
use repute_core::report::{self, fmt_sig};
use repute_core::reputation::{compute_all, ComputeOptions};

#[derive(Parser)]
#[command(
    name = "repute",
    version,
    about = "Time-discounted, fairness-weighted reputation scoring"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score workers and evaluators from an evaluation log.
    Compute(ComputeArgs),
    /// Run the comparison models (flat and adaptive averaging) on a log.
    Baseline(BaselineArgs),
    /// Inject fabricated votes and measure how far each model moves.
    Attack(AttackArgs),
    /// Generate a synthetic evaluation log.
    Synth(SynthArgs),
    /// Summarize a previously written JSON result file.
    Report(ReportArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    /// Header `evaluator,worker,value,timestamp[,credit]`.
    Generic,
    /// Election log: eight tab- or comma-separated fields per vote.
    Wikilog,
}

#[derive(Clone, Copy, ValueEnum)]
enum DialectArg {
    Tab,
    Comma,
}

#[derive(Args)]
struct InputArgs {
    /// Evaluation log to read.
    #[arg(long)]
    input: PathBuf,

    /// Input format.
    #[arg(long, value_enum, default_value = "generic")]
    format: FormatArg,

    /// Field separator for the wikilog format.
    #[arg(long, value_enum, default_value = "tab")]
    dialect: DialectArg,

    /// Drop evaluations where an actor rated themselves.
    #[arg(long)]
    exclude_self_votes: bool,
}

#[derive(Args)]
struct EngineArgs {
    /// Half-life of evidence, in intervals.
    #[arg(long)]
    half_life: Option<f64>,

    /// Upper end of the evaluation scale.
    #[arg(long)]
    scale_max: Option<f64>,

    /// Interval width: half-year, year, quarter, month, week, day, 90d, 3600s.
    #[arg(long)]
    interval: Option<IntervalWidth>,

    /// Credit transform: identity or log1p.
    #[arg(long)]
    credit_fn: Option<CreditFn>,

    /// Consensus statistics: per-evaluator or flat.
    #[arg(long)]
    consensus: Option<ConsensusMode>,

    /// Fairness shape outside the band: literal or complement.
    #[arg(long)]
    fairness: Option<FairnessMode>,

    /// Worker threads; 0 means the runtime default. Results do not depend
    /// on this.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    engine: EngineArgs,

    /// Score as of this interval label, ignoring later evaluations.
    #[arg(long)]
    as_of: Option<u32>,

    /// Directory for result files.
    #[arg(long, default_value = "repute-out")]
    out_dir: PathBuf,

    /// Also write the pairwise graph structure as CSV.
    #[arg(long)]
    dump_graph: bool,

    /// Also write per-worker consensus statistics as CSV.
    #[arg(long)]
    dump_consensus: bool,

    /// Also write per-edge trust and fairness annotations as CSV.
    #[arg(long)]
    dump_edges: bool,
}

#[derive(Args)]
struct BaselineArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    engine: EngineArgs,

    /// Comma-separated comparison models to run.
    #[arg(long, value_delimiter = ',', default_values_t = [BaselineModelArg::NormalAvg, BaselineModelArg::AdaptiveAvg])]
    models: Vec<BaselineModelArg>,

    #[command(flatten)]
    adaptive: AdaptiveArgs,

    /// Directory for result files.
    #[arg(long, default_value = "repute-out")]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BaselineModelArg {
    NormalAvg,
    AdaptiveAvg,
}

impl std::fmt::Display for BaselineModelArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BaselineModelArg::NormalAvg => f.write_str("normal-avg"),
            BaselineModelArg::AdaptiveAvg => f.write_str("adaptive-avg"),
        }
    }
}

#[derive(Args)]
struct AdaptiveArgs {
    /// Damping of the adaptive-average updates, in (0, 1]; 1 is undamped.
    #[arg(long, default_value_t = 1.0)]
    damping: f64,

    /// Convergence tolerance of the adaptive average.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,

    /// Iteration cap of the adaptive average.
    #[arg(long, default_value_t = 100)]
    max_iter: u32,
}

impl AdaptiveArgs {
    fn params(&self) -> AdaptiveParams {
        AdaptiveParams { damping: self.damping, tol: self.tol, max_iter: self.max_iter }
    }
}

#[derive(Args)]
struct AttackArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    engine: EngineArgs,

    /// Injected votes per worker, as a fraction of their vote count.
    #[arg(long, default_value_t = 0.2)]
    noise: f64,

    /// Value injected for workers below the threshold.
    #[arg(long, default_value_t = 3.0)]
    support: f64,

    /// Value injected for workers at or above the threshold.
    #[arg(long, default_value_t = 1.0)]
    attack: f64,

    /// Normal-average cutoff between supported and attacked workers.
    #[arg(long, default_value_t = 2.0)]
    threshold: f64,

    /// Seed recorded with the experiment.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Comma-separated models to compare.
    #[arg(long, value_delimiter = ',', default_values_t = ModelKind::ALL)]
    models: Vec<ModelKind>,

    /// Spread one global injection budget over workers by largest
    /// remainder instead of a per-worker quota.
    #[arg(long)]
    global_budget: bool,

    #[command(flatten)]
    adaptive: AdaptiveArgs,

    /// Directory for result files.
    #[arg(long, default_value = "repute-out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    /// Where to write the generated log (generic format).
    #[arg(long, default_value = "synthetic.csv")]
    out: PathBuf,

    #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u32).range(1..))]
    workers: u32,

    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(1..))]
    evaluators: u32,

    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    intervals: u32,

    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    votes_per_worker: u32,

    /// Fraction of evaluators who vote honestly.
    #[arg(long, default_value_t = 0.8)]
    honest: f64,

    /// Half-width of the noise honest voters add before rounding.
    #[arg(long, default_value_t = 0.5)]
    noise_width: f64,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Interval width used to place timestamps.
    #[arg(long, default_value = "half-year")]
    interval: IntervalWidth,
}

#[derive(Args)]
struct ReportArgs {
    /// A report.json or attack_report.json written by an earlier run.
    #[arg(long)]
    input: PathBuf,
}

// ---------------- failure handling ----------------

enum Failure {
    Usage(String),
    Data(String),
}

type CmdResult<T> = Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn data(msg: impl Into<String>) -> Failure {
    Failure::Data(msg.into())
}

impl From<repute_core::Error> for Failure {
    fn from(err: repute_core::Error) -> Self {
        Failure::Data(err.to_string())
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    let result = match cli.command {
        Command::Compute(args) => cmd_compute(args),
        Command::Baseline(args) => cmd_baseline(args),
        Command::Attack(args) => cmd_attack(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Report(args) => cmd_report(args),
    };
    match result {
        Ok(()) => {}
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
    }
}

// ---------------- configuration ----------------

/// Optional config file, pointed at by REPUTE_CONFIG. Command line flags
/// override its entries.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    half_life: Option<f64>,
    scale_max: Option<f64>,
    interval: Option<String>,
    credit_fn: Option<String>,
    consensus: Option<String>,
    fairness: Option<String>,
    threads: Option<usize>,
}

const CONFIG_ENV: &str = "REPUTE_CONFIG";

fn load_file_config() -> CmdResult<FileConfig> {
    let Some(path) = std::env::var_os(CONFIG_ENV) else {
        return Ok(FileConfig::default());
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| usage(format!("cannot read config file {}: {e}", path.to_string_lossy())))?;
    toml::from_str(&text)
        .map_err(|e| usage(format!("bad config file {}: {e}", path.to_string_lossy())))
}

fn parse_entry<T: FromStr>(value: &Option<String>, what: &str) -> CmdResult<Option<T>>
where
    T::Err: std::fmt::Display,
{
    match value {
        None => Ok(None),
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|e| usage(format!("config file {what}: {e}"))),
    }
}

struct Settings {
    engine: EngineConfig,
    options: ComputeOptions,
}

fn resolve_settings(args: &EngineArgs) -> CmdResult<Settings> {
    let file = load_file_config()?;
    let half_life = args.half_life.or(file.half_life).unwrap_or(2.0);
    let scale_max = args.scale_max.or(file.scale_max).unwrap_or(3.0);
    let interval = match args.interval {
        Some(w) => w,
        None => parse_entry::<IntervalWidth>(&file.interval, "interval")?
            .unwrap_or(IntervalWidth::HALF_YEAR),
    };
    let credit_fn = match args.credit_fn {
        Some(f) => f,
        None => parse_entry::<CreditFn>(&file.credit_fn, "credit_fn")?
            .unwrap_or(CreditFn::Identity),
    };
    let consensus = match args.consensus {
        Some(c) => c,
        None => parse_entry::<ConsensusMode>(&file.consensus, "consensus")?.unwrap_or_default(),
    };
    let fairness = match args.fairness {
        Some(f) => f,
        None => parse_entry::<FairnessMode>(&file.fairness, "fairness")?.unwrap_or_default(),
    };
    let threads = args.threads.or(file.threads).unwrap_or(0);

    let engine = EngineConfig::new(scale_max, half_life, interval, credit_fn)
        .map_err(|e| usage(e.to_string()))?;
    Ok(Settings { engine, options: ComputeOptions { consensus, fairness, threads } })
}

// ---------------- manifest ----------------

#[derive(Serialize)]
struct PhaseTiming {
    phase: String,
    ms: u64,
}

struct Phases {
    list: Vec<PhaseTiming>,
    last: Instant,
}

impl Phases {
    fn new() -> Self {
        Phases { list: Vec::new(), last: Instant::now() }
    }

    fn mark(&mut self, phase: &str) {
        let now = Instant::now();
        self.list.push(PhaseTiming {
            phase: phase.to_string(),
            ms: now.duration_since(self.last).as_millis() as u64,
        });
        self.last = now;
    }
}

#[derive(Serialize)]
struct IngestEcho {
    format: String,
    accepted: usize,
    rejected: usize,
    rejected_sample: Vec<String>,
    self_votes_dropped: Option<usize>,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: String,
    command: String,
    created_utc: String,
    inputs: Vec<String>,
    outputs: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    engine: Option<&'a EngineConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    consensus: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fairness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    horizon: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ingest: Option<&'a IngestEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    attack: Option<&'a AttackSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    budget: Option<InjectionBudget>,
    #[serde(skip_serializing_if = "Option::is_none")]
    models: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    adaptive: Option<&'a AdaptiveParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    synth: Option<&'a SynthSpec>,
    timings_ms: &'a [PhaseTiming],
}

impl<'a> Manifest<'a> {
    fn new(outputs: &'a [String], timings: &'a [PhaseTiming]) -> Self {
        Manifest {
            tool: format!("repute {}", env!("CARGO_PKG_VERSION")),
            command: std::env::args().skip(1).collect::<Vec<_>>().join(" "),
            created_utc: chrono::Utc::now().format("%Y-%m-%dT%H:%M:%SZ").to_string(),
            inputs: Vec::new(),
            outputs,
            engine: None,
            consensus: None,
            fairness: None,
            threads: None,
            horizon: None,
            ingest: None,
            attack: None,
            budget: None,
            models: None,
            adaptive: None,
            synth: None,
            timings_ms: timings,
        }
    }

    fn with_settings(mut self, settings: &'a Settings) -> Self {
        self.engine = Some(&settings.engine);
        self.consensus = Some(settings.options.consensus.to_string());
        self.fairness = Some(settings.options.fairness.to_string());
        self.threads = Some(settings.options.threads);
        self
    }
}

// ---------------- shared plumbing ----------------

fn load_evaluations(
    input: &InputArgs,
    engine: &EngineConfig,
) -> CmdResult<(Vec<Evaluation>, IngestEcho)> {
    if input.format == FormatArg::Wikilog && engine.scale_max() < 3.0 {
        return Err(usage(format!(
            "wikilog votes live on the three-point scale; --scale-max {} is too small",
            engine.scale_max()
        )));
    }
    let file = fs::File::open(&input.input)
        .map_err(|e| data(format!("cannot open {}: {e}", input.input.display())))?;
    let reader = std::io::BufReader::new(file);
    let outcome: IngestOutcome = match input.format {
        FormatArg::Wikilog => {
            let dialect = match input.dialect {
                DialectArg::Tab => Dialect::Tab,
                DialectArg::Comma => Dialect::Comma,
            };
            ingest::ingest_wikilog(reader, dialect, engine.interval_width())?.0
        }
        FormatArg::Generic => {
            ingest::ingest_generic(reader, engine.interval_width(), engine.scale_max())?.0
        }
    };
    for warning in &outcome.warnings {
        eprintln!("warning: {warning}");
    }
    if !outcome.rejected.is_empty() {
        eprintln!("warning: rejected {} malformed record(s)", outcome.rejected.len());
        for r in outcome.rejected.iter().take(5) {
            eprintln!("  line {}: {}", r.line, r.reason);
        }
    }

    let (evaluations, dropped) = if input.exclude_self_votes {
        let (kept, dropped) = drop_self_votes(outcome.evaluations);
        (kept, Some(dropped))
    } else {
        (outcome.evaluations, None)
    };
    if evaluations.is_empty() {
        return Err(data("no records left after filtering".to_string()));
    }

    let echo = IngestEcho {
        format: match input.format {
            FormatArg::Generic => "generic".to_string(),
            FormatArg::Wikilog => "wikilog".to_string(),
        },
        accepted: evaluations.len(),
        rejected: outcome.rejected.len(),
        rejected_sample: outcome
            .rejected
            .iter()
            .take(8)
            .map(|r| format!("line {}: {}", r.line, r.reason))
            .collect(),
        self_votes_dropped: dropped,
        warnings: outcome.warnings,
    };
    Ok((evaluations, echo))
}

fn ensure_out_dir(dir: &Path) -> CmdResult<()> {
    fs::create_dir_all(dir).map_err(|e| data(format!("cannot create {}: {e}", dir.display())))
}

/// Writes one result file through a CSV- or text-producing closure and
/// records it in the output list.
fn write_file(
    dir: &Path,
    name: &str,
    outputs: &mut Vec<String>,
    fill: impl FnOnce(&mut Vec<u8>) -> repute_core::Result<()>,
) -> CmdResult<()> {
    let mut buf = Vec::new();
    fill(&mut buf)?;
    let path = dir.join(name);
    fs::write(&path, buf).map_err(|e| data(format!("cannot write {}: {e}", path.display())))?;
    outputs.push(name.to_string());
    println!("wrote {}", path.display());
    Ok(())
}

fn write_json_file(
    dir: &Path,
    name: &str,
    outputs: &mut Vec<String>,
    value: &Value,
) -> CmdResult<()> {
    write_file(dir, name, outputs, |buf| {
        serde_json::to_writer_pretty(&mut *buf, value)?;
        buf.push(b'\n');
        Ok(())
    })
}

fn write_manifest(dir: &Path, manifest: &Manifest) -> CmdResult<()> {
    let path = dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(manifest)
        .map_err(|e| data(format!("cannot serialize manifest: {e}")))?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| data(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

// ---------------- compute ----------------

fn cmd_compute(args: ComputeArgs) -> CmdResult<()> {
    let settings = resolve_settings(&args.engine)?;
    let mut phases = Phases::new();

    let (mut evaluations, ingest_echo) = load_evaluations(&args.input, &settings.engine)?;
    phases.mark("ingest");

    if let Some(as_of) = args.as_of {
        evaluations.retain(|e| e.time_label <= as_of);
        if evaluations.is_empty() {
            return Err(data(format!("no evaluations at or before interval {as_of}")));
        }
    }
    let horizon = args
        .as_of
        .unwrap_or_else(|| max_label(&evaluations).expect("non-empty"));
    let mut graph = build_graph(&evaluations, horizon)?;
    phases.mark("graph");

    let output = compute_all(&mut graph, &settings.engine, &settings.options)?;
    phases.mark("compute");

    for diagnostic in &output.diagnostics {
        eprintln!("note: {diagnostic}");
    }

    ensure_out_dir(&args.out_dir)?;
    let mut outputs = Vec::new();
    write_file(&args.out_dir, "workers.csv", &mut outputs, |buf| {
        report::write_workers_csv(&output.workers, buf)
    })?;
    write_file(&args.out_dir, "evaluators.csv", &mut outputs, |buf| {
        report::write_evaluators_csv(&output.evaluators, buf)
    })?;
    write_json_file(&args.out_dir, "report.json", &mut outputs, &report::combined_report(&output))?;
    if args.dump_graph {
        write_file(&args.out_dir, "graph.csv", &mut outputs, |buf| {
            report::write_graph_csv(&graph, buf)
        })?;
    }
    if args.dump_consensus {
        write_file(&args.out_dir, "consensus.csv", &mut outputs, |buf| {
            report::write_consensus_csv(&output.consensus, buf)
        })?;
    }
    if args.dump_edges {
        write_file(&args.out_dir, "edges.csv", &mut outputs, |buf| {
            report::write_edges_csv(&graph, buf)
        })?;
    }
    phases.mark("write");

    let mut manifest = Manifest::new(&outputs, &phases.list).with_settings(&settings);
    manifest.inputs = vec![args.input.input.display().to_string()];
    manifest.horizon = Some(horizon);
    manifest.ingest = Some(&ingest_echo);
    write_manifest(&args.out_dir, &manifest)?;

    println!(
        "scored {} workers and {} evaluators from {} evaluations (horizon {horizon})",
        output.workers.len(),
        output.evaluators.len(),
        graph.evaluation_count(),
    );
    Ok(())
}

// ---------------- baseline ----------------

fn cmd_baseline(args: BaselineArgs) -> CmdResult<()> {
    let settings = resolve_settings(&args.engine)?;
    if args.models.is_empty() {
        return Err(usage("no baseline models selected".to_string()));
    }
    let mut phases = Phases::new();

    let (evaluations, ingest_echo) = load_evaluations(&args.input, &settings.engine)?;
    phases.mark("ingest");
    let horizon = max_label(&evaluations).expect("non-empty");
    let graph = build_graph(&evaluations, horizon)?;
    phases.mark("graph");

    let adaptive_params = args.adaptive.params();
    let mut sections: Vec<(BaselineModel, std::collections::BTreeMap<String, f64>)> = Vec::new();
    for model in &args.models {
        match model {
            BaselineModelArg::NormalAvg => {
                sections.push((BaselineModel::NormalAvg, normal_averages(&graph)?));
            }
            BaselineModelArg::AdaptiveAvg => {
                let initial = settings.engine.scale_max() / 2.0;
                let outcome = adaptive_average(&graph, initial, &adaptive_params)?;
                if !outcome.converged {
                    eprintln!(
                        "warning: adaptive average did not converge in {} iterations",
                        outcome.iterations
                    );
                }
                sections.push((BaselineModel::AdaptiveAvg, outcome.worker_scores(&graph)));
            }
        }
    }
    phases.mark("compute");

    ensure_out_dir(&args.out_dir)?;
    let mut outputs = Vec::new();
    let borrowed: Vec<(BaselineModel, &std::collections::BTreeMap<String, f64>)> =
        sections.iter().map(|(m, s)| (*m, s)).collect();
    write_file(&args.out_dir, "baselines.csv", &mut outputs, |buf| {
        report::write_baselines_csv(&borrowed, buf)
    })?;
    phases.mark("write");

    let mut manifest = Manifest::new(&outputs, &phases.list).with_settings(&settings);
    manifest.inputs = vec![args.input.input.display().to_string()];
    manifest.horizon = Some(horizon);
    manifest.ingest = Some(&ingest_echo);
    manifest.models = Some(args.models.iter().map(|m| m.to_string()).collect());
    manifest.adaptive = Some(&adaptive_params);
    write_manifest(&args.out_dir, &manifest)?;

    println!("scored {} workers under {} model(s)", graph.worker_count(), sections.len());
    Ok(())
}

// ---------------- attack ----------------

fn cmd_attack(args: AttackArgs) -> CmdResult<()> {
    let settings = resolve_settings(&args.engine)?;
    let mut phases = Phases::new();

    let (evaluations, ingest_echo) = load_evaluations(&args.input, &settings.engine)?;
    phases.mark("ingest");

    let spec = AttackSpec {
        noise_fraction: args.noise,
        support_value: args.support,
        attack_value: args.attack,
        threshold: args.threshold,
        seed: args.seed,
    };
    let models: BTreeSet<ModelKind> = args.models.iter().copied().collect();
    if models.is_empty() {
        return Err(usage("no models selected".to_string()));
    }
    let budget = if args.global_budget {
        InjectionBudget::Global
    } else {
        InjectionBudget::PerWorker
    };
    let adaptive_params = args.adaptive.params();
    let options = ExperimentOptions {
        compute: settings.options,
        adaptive: adaptive_params,
        models,
        budget,
    };
    let experiment = run_experiment(&evaluations, &spec, &settings.engine, &options)
        .map_err(|e| match e {
            repute_core::Error::InvalidConfig(msg) => usage(msg),
            other => Failure::from(other),
        })?;
    phases.mark("experiment");

    for warning in &experiment.warnings {
        eprintln!("warning: {warning}");
    }

    ensure_out_dir(&args.out_dir)?;
    let mut outputs = Vec::new();
    for (model, outcome) in &experiment.models {
        write_file(&args.out_dir, &format!("changes_{model}.csv"), &mut outputs, |buf| {
            report::write_changes_csv(&outcome.full, buf)
        })?;
        write_file(
            &args.out_dir,
            &format!("histogram_{model}_full.csv"),
            &mut outputs,
            |buf| report::write_histogram_csv(&outcome.full, buf),
        )?;
        if let Some(changed) = &outcome.changed {
            write_file(
                &args.out_dir,
                &format!("histogram_{model}_changed.csv"),
                &mut outputs,
                |buf| report::write_histogram_csv(changed, buf),
            )?;
        }
    }
    write_json_file(
        &args.out_dir,
        "attack_report.json",
        &mut outputs,
        &report::attack_report_json(&experiment, &spec),
    )?;
    phases.mark("write");

    let mut manifest = Manifest::new(&outputs, &phases.list).with_settings(&settings);
    manifest.inputs = vec![args.input.input.display().to_string()];
    manifest.ingest = Some(&ingest_echo);
    manifest.attack = Some(&spec);
    manifest.budget = Some(budget);
    manifest.models = Some(options.models.iter().map(|m| m.to_string()).collect());
    manifest.adaptive = Some(&adaptive_params);
    write_manifest(&args.out_dir, &manifest)?;

    println!(
        "injected {} votes over {} workers (changed cohort: {})",
        experiment.injected_count,
        experiment.worker_count,
        experiment.changed_cohort.len()
    );
    for (model, outcome) in &experiment.models {
        println!(
            "  {model}: mean change {}, sd {}, under 10%: {}",
            fmt_sig(outcome.full.mean, 6),
            fmt_sig(outcome.full.sd, 6),
            fmt_sig(outcome.full.fraction_below_10pct(), 6),
        );
    }
    Ok(())
}

// ---------------- synth ----------------

fn cmd_synth(args: SynthArgs) -> CmdResult<()> {
    if !(0.0..=1.0).contains(&args.honest) {
        return Err(usage(format!("--honest must lie in [0, 1], got {}", args.honest)));
    }
    if !args.noise_width.is_finite() || args.noise_width < 0.0 {
        return Err(usage(format!("--noise-width must be non-negative, got {}", args.noise_width)));
    }
    let spec = SynthSpec {
        workers: args.workers,
        evaluators: args.evaluators,
        intervals: args.intervals,
        votes_per_worker: args.votes_per_worker,
        honest_fraction: args.honest,
        noise_width: args.noise_width,
        seed: args.seed,
        interval_width: args.interval,
    };
    let mut phases = Phases::new();
    let synth = generate_synthetic(&spec).map_err(|e| usage(e.to_string()))?;
    phases.mark("generate");

    let mut buf = Vec::new();
    ingest::serialize_generic(&synth.evaluations, &mut buf)?;
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| data(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    fs::write(&args.out, buf)
        .map_err(|e| data(format!("cannot write {}: {e}", args.out.display())))?;
    println!("wrote {}", args.out.display());
    phases.mark("write");

    let outputs = vec![args.out.display().to_string()];
    let mut manifest = Manifest::new(&outputs, &phases.list);
    manifest.synth = Some(&spec);
    let manifest_path = args.out.with_extension("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| data(format!("cannot serialize manifest: {e}")))?;
    text.push('\n');
    fs::write(&manifest_path, text)
        .map_err(|e| data(format!("cannot write {}: {e}", manifest_path.display())))?;
    println!("wrote {}", manifest_path.display());

    println!(
        "generated {} evaluations for {} workers ({} dishonest evaluators)",
        synth.evaluations.len(),
        spec.workers,
        synth.dishonest.len()
    );
    Ok(())
}

// ---------------- report ----------------

fn cmd_report(args: ReportArgs) -> CmdResult<()> {
    let text = fs::read_to_string(&args.input)
        .map_err(|e| data(format!("cannot read {}: {e}", args.input.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| data(format!("{} is not valid JSON: {e}", args.input.display())))?;

    let out = std::io::stdout();
    let mut out = out.lock();
    if value.get("models").is_some() && value.get("spec").is_some() {
        summarize_attack_report(&value, &mut out).map_err(|e| data(e.to_string()))?;
    } else if value.is_object() {
        summarize_compute_report(&value, &mut out).map_err(|e| data(e.to_string()))?;
    } else {
        return Err(data(format!(
            "{} does not look like a result file",
            args.input.display()
        )));
    }
    Ok(())
}

fn summarize_attack_report(value: &Value, out: &mut impl std::io::Write) -> std::io::Result<()> {
    writeln!(
        out,
        "injection experiment: {} injected votes over {} workers, changed cohort {}",
        value["injected_count"], value["worker_count"], value["changed_cohort_size"]
    )?;
    if let Some(models) = value["models"].as_object() {
        for (model, entry) in models {
            for cohort in ["full", "changed"] {
                let section = &entry[cohort];
                if section.is_null() {
                    continue;
                }
                writeln!(
                    out,
                    "  {model} ({cohort}): cohort {}, mean {}, sd {}, under 10%: {}",
                    section["cohort_size"],
                    fmt_sig(section["mean"].as_f64().unwrap_or(f64::NAN), 6),
                    fmt_sig(section["sd"].as_f64().unwrap_or(f64::NAN), 6),
                    fmt_sig(section["fraction_below_10pct"].as_f64().unwrap_or(f64::NAN), 6),
                )?;
            }
        }
    }
    Ok(())
}

fn summarize_compute_report(value: &Value, out: &mut impl std::io::Write) -> std::io::Result<()> {
    let actors = value.as_object().expect("checked by caller");
    let mut workers = 0usize;
    let mut evaluators = 0usize;
    let mut degenerate = 0usize;
    let mut rho_sum = 0.0;
    let mut weight_sum = 0.0;
    for entry in actors.values() {
        if let Some(rep) = entry.get("reputation") {
            workers += 1;
            rho_sum += rep["rho"].as_f64().unwrap_or(0.0);
            weight_sum += rep["weight"].as_f64().unwrap_or(0.0);
            if rep["degenerate"].as_bool().unwrap_or(false) {
                degenerate += 1;
            }
        }
        if entry.get("fairness").is_some() {
            evaluators += 1;
        }
    }
    writeln!(out, "actors: {}", actors.len())?;
    writeln!(out, "workers: {workers} ({degenerate} degenerate)")?;
    writeln!(out, "evaluators: {evaluators}")?;
    if workers > 0 {
        writeln!(
            out,
            "mean reputation: {}, mean weight: {}",
            fmt_sig(rho_sum / workers as f64, 6),
            fmt_sig(weight_sum / workers as f64, 6),
        )?;
    }
    Ok(())
}
