//! The `cosmic` command line. [`run`] parses arguments and executes one
//! subcommand, returning the process exit code: 0 on success, 2 for input
//! errors, 3 for numeric failures.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use cosmic_core::analysis::{correlation_report, expected_error_rate, Scores};
use cosmic_core::bounds::{prop1_bounds, rd_inverse};
use cosmic_core::hierarchy::{export_dot, HierarchyPlan};
use cosmic_core::knife::{pointwise_mi, KnifeConfig};
use cosmic_core::oracle::summarize_sweep;
use cosmic_core::scores::{cosmic_score_with_models, RunLabels};
use cosmic_core::{validate_pairing, EmbeddingMatrix, RngSeed};

use crate::io::{
    self, ids_path, read_cemb_with_ids, read_labels, read_manifest, read_model, read_scores, write_model, IoError,
    StoredModel, CEMB_MAGIC,
};
use crate::parallel;
use crate::report::{self, Units};

#[derive(Debug, Parser)]
#[command(name = "cosmic", version, about = "Score summarizers by the mutual information between source and summary embeddings")]
pub struct Cli {
    /// Log progress to stderr (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the score of one summarizer from paired CEMB files.
    Score(ScoreArgs),
    /// Error-rate bounds for a given mutual information, or a CSV sweep.
    Bounds(BoundsArgs),
    /// Check the error bounds on random discrete joints.
    VerifyBounds(VerifyArgs),
    /// Pairwise MI between summarizers, as a matrix CSV and a DOT graph.
    Hierarchy(HierarchyArgs),
    /// Rank correlations between metric scores and target scores.
    Correlate(CorrelateArgs),
    /// Expected error rate between two label files.
    Agreement(AgreementArgs),
    /// Check CEMB files or manifests and list any problems.
    Validate(ValidateArgs),
    /// Per-pair pointwise MI from saved models.
    Pmi(PmiArgs),
}

#[derive(Debug, Clone, Args)]
pub struct KnifeArgs {
    /// Mixture modes.
    #[arg(long, default_value_t = 4)]
    pub modes: usize,
    /// Adam learning rate.
    #[arg(long, default_value_t = 1e-3)]
    pub learn_rate: f64,
    /// Maximum training epochs.
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    /// Minibatch size.
    #[arg(long, default_value_t = 128)]
    pub batch_size: usize,
    /// Epochs without improvement before stopping.
    #[arg(long, default_value_t = 10)]
    pub patience: usize,
    /// Fraction of rows held out for evaluation; 0 evaluates on the training rows.
    #[arg(long, default_value_t = 0.0)]
    pub holdout_fraction: f64,
    /// Skip per-dimension standardization.
    #[arg(long)]
    pub no_standardize: bool,
    /// Hidden width of the conditional network.
    #[arg(long, default_value_t = 64)]
    pub hidden_width: usize,
    /// Lower clamp on mixture standard deviations.
    #[arg(long, default_value_t = 1e-4)]
    pub sigma_floor: f64,
    /// Upper clamp on mixture standard deviations.
    #[arg(long, default_value_t = 1e4)]
    pub sigma_ceil: f64,
    /// Random seed.
    #[arg(long, env = "COSMIC_SEED", default_value_t = 0)]
    pub seed: u64,
}

impl KnifeArgs {
    pub fn config(&self) -> KnifeConfig {
        KnifeConfig {
            modes: self.modes,
            learn_rate: self.learn_rate,
            epochs: self.epochs,
            batch_size: self.batch_size,
            patience: self.patience,
            holdout_fraction: self.holdout_fraction,
            standardize: !self.no_standardize,
            hidden_width: self.hidden_width,
            sigma_floor: self.sigma_floor,
            sigma_ceil: self.sigma_ceil,
            seed: RngSeed(self.seed),
            ..KnifeConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Source-document embeddings.
    #[arg(long)]
    pub source: PathBuf,
    /// Summary embeddings.
    #[arg(long)]
    pub summary: PathBuf,
    /// Ids for the source rows [default: <source>.ids].
    #[arg(long)]
    pub source_ids: Option<PathBuf>,
    /// Ids for the summary rows [default: <summary>.ids].
    #[arg(long)]
    pub summary_ids: Option<PathBuf>,
    /// Summarizer name for the report [default: summary file stem].
    #[arg(long)]
    pub summarizer: Option<String>,
    /// Dataset name for the report.
    #[arg(long, default_value = "")]
    pub dataset: String,
    /// Embedder name for the report.
    #[arg(long, default_value = "")]
    pub embedder: String,
    /// Write PREFIX.txt and PREFIX.csv instead of printing the report.
    #[arg(long, value_name = "PREFIX")]
    pub out: Option<PathBuf>,
    /// Save the fitted models of both directions into DIR.
    #[arg(long, value_name = "DIR")]
    pub save_models: Option<PathBuf>,
    /// Display entropies and MI in bits.
    #[arg(long)]
    pub bits: bool,
    #[command(flatten)]
    pub knife: KnifeArgs,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Mutual information in nats.
    #[arg(long, allow_negative_numbers = true, required_unless_present = "sweep")]
    pub mi: Option<f64>,
    /// Number of concept classes.
    #[arg(long, required_unless_present = "sweep")]
    pub m: Option<u32>,
    /// Entropy H(C) of a discrete concept in nats; enables the upper bound.
    #[arg(long, allow_negative_numbers = true)]
    pub entropy: Option<f64>,
    /// Emit an `m,mi,lower,upper` CSV over a grid of MI values.
    #[arg(long, conflicts_with_all = ["mi", "m", "entropy"])]
    pub sweep: bool,
    /// Class counts for the sweep.
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,32")]
    pub ms: Vec<u32>,
    /// Grid points per class count, from 0 to ln m.
    #[arg(long, default_value_t = 101)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Number of random joints.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Random seed.
    #[arg(long, env = "COSMIC_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Largest alphabet size drawn.
    #[arg(long, default_value_t = 8)]
    pub max_size: usize,
    /// Worker threads [default: logical cores].
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct HierarchyArgs {
    /// One manifest per summarizer.
    #[arg(required = true, num_args = 2..)]
    pub manifests: Vec<PathBuf>,
    /// Minimum MI for a DOT edge.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub threshold: f64,
    /// Write PREFIX.csv, PREFIX.dot and PREFIX.summary.csv instead of printing.
    #[arg(long, value_name = "PREFIX")]
    pub out: Option<PathBuf>,
    /// Worker threads [default: logical cores].
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Display MI in bits.
    #[arg(long)]
    pub bits: bool,
    #[command(flatten)]
    pub knife: KnifeArgs,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    /// Metric scores as NAME=PATH or PATH (named by file stem); `id,value` rows keyed by summarizer.
    #[arg(long = "metric", required = true)]
    pub metrics: Vec<String>,
    /// Target scores, same format.
    #[arg(long = "target", required = true)]
    pub targets: Vec<String>,
    /// Also write the long-format CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AgreementArgs {
    /// `id,label` file.
    pub a: PathBuf,
    /// `id,label` file.
    pub b: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// CEMB files or manifests.
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PmiArgs {
    /// Saved marginal model.
    #[arg(long)]
    pub marginal: PathBuf,
    /// Saved conditional model.
    #[arg(long)]
    pub conditional: PathBuf,
    /// Embeddings of the predicted side.
    #[arg(long)]
    pub target: PathBuf,
    /// Embeddings of the conditioning side.
    #[arg(long)]
    pub condition: PathBuf,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Core(#[from] cosmic_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{0} problem(s) found")]
    Diagnostics(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        let core_code = |e: &cosmic_core::Error| if e.is_input_error() { 2 } else { 3 };
        match self {
            CliError::Core(e) | CliError::Io(IoError::Data { source: e, .. }) => core_code(e),
            _ => 2,
        }
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => finish(execute(&cli, out), err),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                2
            } else {
                let _ = out.write_all(text.as_bytes());
                0
            }
        }
    }
}

/// Reports the outcome of [`execute`] and maps it to an exit code.
pub fn finish(result: CliResult, err: &mut dyn Write) -> i32 {
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult {
    match &cli.command {
        Command::Score(a) => cmd_score(a, out),
        Command::Bounds(a) => cmd_bounds(a, out),
        Command::VerifyBounds(a) => cmd_verify_bounds(a, out),
        Command::Hierarchy(a) => cmd_hierarchy(a, out),
        Command::Correlate(a) => cmd_correlate(a, out),
        Command::Agreement(a) => cmd_agreement(a, out),
        Command::Validate(a) => cmd_validate(a, out),
        Command::Pmi(a) => cmd_pmi(a, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> CliResult {
    out.write_all(text.as_bytes()).map_err(|source| CliError::Write { path: "<stdout>".into(), source })
}

fn write_file(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn load(path: &Path, ids: Option<&Path>) -> io::Result<EmbeddingMatrix> {
    read_cemb_with_ids(path, &ids.map_or_else(|| ids_path(path), Path::to_path_buf))
}

pub fn cmd_score(args: &ScoreArgs, out: &mut dyn Write) -> CliResult {
    let cfg = args.knife.config();
    cfg.validate()?;
    let source = load(&args.source, args.source_ids.as_deref())?;
    let summary = load(&args.summary, args.summary_ids.as_deref())?;
    let pairs = validate_pairing(source, summary)?;
    let labels = RunLabels {
        summarizer: args.summarizer.clone().unwrap_or_else(|| file_stem(&args.summary)),
        dataset: args.dataset.clone(),
        embedder: args.embedder.clone(),
    };
    log::info!("scoring {} pairs", pairs.n_rows());
    let (result, fits) = cosmic_score_with_models(&pairs, &cfg, labels)?;
    for w in &result.warnings {
        log::warn!("{w}");
    }
    if let Some(dir) = &args.save_models {
        fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.clone(), source })?;
        for (name, fit) in ["s_to_t", "t_to_s"].iter().zip(fits) {
            write_model(&StoredModel::Marginal(fit.marginal), &dir.join(format!("{name}.marginal.knfe")))?;
            write_model(&StoredModel::Conditional(Box::new(fit.conditional)), &dir.join(format!("{name}.conditional.knfe")))?;
        }
    }
    let units = if args.bits { Units::Bits } else { Units::Nats };
    let text = report::cosmic_text(&result, units);
    let csv = report::cosmic_csv(&result, units);
    match &args.out {
        Some(prefix) => {
            write_file(&with_suffix(prefix, ".txt"), &text)?;
            write_file(&with_suffix(prefix, ".csv"), &csv)?;
            emit(out, &format!("mi: {}\n", units.convert(result.score())))
        }
        None => emit(out, &text),
    }
}

pub fn cmd_bounds(args: &BoundsArgs, out: &mut dyn Write) -> CliResult {
    if args.sweep {
        if args.points < 2 {
            return Err(CliError::Usage("--points must be at least 2".into()));
        }
        let mut csv = String::from("m,mi,lower,upper\n");
        for &m in &args.ms {
            let h = (m as f64).ln();
            for k in 0..args.points {
                let mi = h * k as f64 / (args.points - 1) as f64;
                let b = prop1_bounds(mi, m, h)?;
                csv.push_str(&format!("{m},{mi},{},{}\n", b.lower, b.upper));
            }
        }
        return emit(out, &csv);
    }
    let (Some(mi), Some(m)) = (args.mi, args.m) else {
        return Err(CliError::Usage("--mi and --m are required without --sweep".into()));
    };
    let mut text = format!("mi: {mi}\nm: {m}\n");
    match args.entropy {
        Some(h) => {
            let b = prop1_bounds(mi, m, h)?;
            text.push_str(&format!("entropy: {h}\nlower: {}\nupper: {}\nkappa: {}\n", b.lower, b.upper, b.kappa));
        }
        None => text.push_str(&format!("lower: {}\n", rd_inverse(m, mi)?)),
    }
    emit(out, &text)
}

pub fn cmd_verify_bounds(args: &VerifyArgs, out: &mut dyn Write) -> CliResult {
    if args.max_size < 2 {
        return Err(CliError::Usage("--max-size must be at least 2".into()));
    }
    let checks = parallel::verify_sweep(args.trials, RngSeed(args.seed), args.max_size, args.jobs)?;
    let mut by_m: BTreeMap<u32, Vec<_>> = BTreeMap::new();
    for c in &checks {
        by_m.entry(c.report.m).or_default().push(*c);
    }
    let groups: Vec<_> = by_m.iter().map(|(m, cs)| (*m, summarize_sweep(cs))).collect();
    let total = summarize_sweep(&checks);
    emit(out, &report::sweep_text(&groups, &total))?;
    if total.all_pass() {
        Ok(())
    } else {
        Err(CliError::Core(cosmic_core::Error::Numeric(format!(
            "bound violated in trials {:?}",
            total.failures
        ))))
    }
}

pub fn cmd_hierarchy(args: &HierarchyArgs, out: &mut dyn Write) -> CliResult {
    let cfg = args.knife.config();
    cfg.validate()?;
    let mut sets = Vec::with_capacity(args.manifests.len());
    for path in &args.manifests {
        let manifest = read_manifest(path)?;
        sets.push((manifest.summarizer_name.clone(), manifest.load_embeddings()?));
    }
    let plan = HierarchyPlan::new(sets, &cfg)?;
    log::info!("fitting {} ordered pairs", plan.tasks().len());
    let result = parallel::run_hierarchy(&plan, args.jobs)?;
    let units = if args.bits { Units::Bits } else { Units::Nats };
    let csv = report::hierarchy_csv(&result, units);
    let dot = export_dot(&result, args.threshold);
    let summary = report::hierarchy_summary(&result, units);
    match &args.out {
        Some(prefix) => {
            write_file(&with_suffix(prefix, ".csv"), &csv)?;
            write_file(&with_suffix(prefix, ".dot"), &dot)?;
            write_file(&with_suffix(prefix, ".summary.csv"), &summary)?;
            emit(out, &summary)
        }
        None => emit(out, &format!("{csv}\n{summary}\n{dot}")),
    }
}

fn named_scores(arg: &str) -> CliResult<(String, Scores)> {
    let (name, path) = match arg.split_once('=') {
        Some((n, p)) if !n.is_empty() => (n.to_string(), PathBuf::from(p)),
        _ => (file_stem(Path::new(arg)), PathBuf::from(arg)),
    };
    Ok((name, read_scores(&path)?))
}

pub fn cmd_correlate(args: &CorrelateArgs, out: &mut dyn Write) -> CliResult {
    let metrics = args.metrics.iter().map(|s| named_scores(s)).collect::<CliResult<Vec<_>>>()?;
    let targets = args.targets.iter().map(|s| named_scores(s)).collect::<CliResult<Vec<_>>>()?;
    let result = correlation_report(&metrics, &targets)?;
    if let Some(path) = &args.csv {
        write_file(path, &report::correlation_csv(&result))?;
    }
    emit(out, &report::correlation_table(&result))
}

pub fn cmd_agreement(args: &AgreementArgs, out: &mut dyn Write) -> CliResult {
    let a = read_labels(&args.a)?;
    let b = read_labels(&args.b)?;
    let result = expected_error_rate(&a.labels, &b.labels)?;
    emit(out, &report::agreement_text(&result))
}

fn is_cemb(path: &Path) -> bool {
    use std::io::Read;
    let mut magic = [0u8; 4];
    fs::File::open(path).and_then(|mut f| f.read_exact(&mut magic)).is_ok() && magic == CEMB_MAGIC
}

/// Problems with one embedding file and its ids, or a summary line when clean.
fn check_embeddings(path: &Path, ids: &Path) -> Result<String, Vec<String>> {
    let matrix = load(path, Some(ids)).map_err(|e| vec![e.to_string()])?;
    let mut problems = Vec::new();
    let dups = matrix.duplicate_ids();
    if !dups.is_empty() {
        problems.push(format!("{}: duplicate ids: {}", ids.display(), dups.join(", ")));
    }
    if matrix.ids().iter().any(String::is_empty) {
        problems.push(format!("{}: empty id", ids.display()));
    }
    if problems.is_empty() {
        Ok(format!("{} rows x {} dims", matrix.n_rows(), matrix.dim()))
    } else {
        Err(problems)
    }
}

pub fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write) -> CliResult {
    let mut total = 0;
    let mut text = String::new();
    for path in &args.paths {
        let outcome = if is_cemb(path) {
            check_embeddings(path, &ids_path(path))
        } else {
            match read_manifest(path) {
                Ok(m) => check_embeddings(&m.embedding_file, &m.ids_file)
                    .map(|s| format!("manifest for {} ({s})", m.summarizer_name)),
                Err(e) => Err(vec![e.to_string()]),
            }
        };
        match outcome {
            Ok(summary) => text.push_str(&format!("{}: ok, {summary}\n", path.display())),
            Err(problems) => {
                total += problems.len();
                for p in problems {
                    text.push_str(&format!("{}: {p}\n", path.display()));
                }
            }
        }
    }
    text.push_str(&format!("diagnostics: {total}\n"));
    emit(out, &text)?;
    if total == 0 {
        Ok(())
    } else {
        Err(CliError::Diagnostics(total))
    }
}

pub fn cmd_pmi(args: &PmiArgs, out: &mut dyn Write) -> CliResult {
    let StoredModel::Marginal(marginal) = read_model(&args.marginal)? else {
        return Err(CliError::Usage(format!("{}: not a marginal model", args.marginal.display())));
    };
    let StoredModel::Conditional(conditional) = read_model(&args.conditional)? else {
        return Err(CliError::Usage(format!("{}: not a conditional model", args.conditional.display())));
    };
    let pairs = validate_pairing(load(&args.target, None)?, load(&args.condition, None)?)?;
    let mut csv = String::from("id,pmi\n");
    for (i, id) in pairs.source().ids().iter().enumerate() {
        let pmi = pointwise_mi(&marginal, &conditional, pairs.source().row(i), pairs.summary().row(i))?;
        csv.push_str(&format!("{},{pmi}\n", report::csv_field(id)));
    }
    match &args.out {
        Some(path) => write_file(path, &csv),
        None => emit(out, &csv),
    }
}
