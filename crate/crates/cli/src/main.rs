//! `lores-eval` command-line interface.
//!
//! Exit codes:
//!   0  success
//!   1  invalid input or other failure
//!   2  file could not be read, parsed or written
//!   3  hypothesis/reference (or source/target) line counts differ
//!   4  comparison needs at least two entries and a baseline
//!   5  annotation file fails schema validation
//!  64  command-line usage error

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lores_eval::corpus::CorpusError;
use lores_eval::green::GreenError;
use lores_eval::hpo::HpoError;
use lores_eval::humaneval::HumanEvalError;
use lores_eval::metrics::{MetricError, MetricScale};
use lores_eval::reports::{MetricName, ReportError};

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_FILE: u8 = 2;
pub const EXIT_ALIGNMENT: u8 = 3;
pub const EXIT_COMPARE: u8 = 4;
pub const EXIT_SCHEMA: u8 = 5;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "lores-eval",
    version,
    about = "Machine translation evaluation toolkit"
)]
pub struct Cli {
    /// Print machine-readable JSON instead of a table.
    #[arg(long, global = true)]
    pub json: bool,

    /// Directory for per-command run logs [default: $LORES_EVAL_LOG_DIR or ./logs].
    #[arg(long, global = true, value_name = "DIR")]
    pub log_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a hypothesis file against a line-aligned reference file.
    Evaluate(EvaluateArgs),
    /// Rank systems from a JSON entries file and compare against a baseline.
    Compare(CompareArgs),
    /// Human-evaluation report: MQM tallies, SQM mean and Cohen's kappa.
    Agree(AgreeArgs),
    /// Estimate GPU energy use and emissions of a training run.
    Green(GreenArgs),
    /// Deduplicate and split a parallel corpus into train/valid/test.
    Split(SplitArgs),
    /// Remove repeated sentence pairs from a parallel corpus.
    Dedup(DedupArgs),
    /// Write one trainer config per hyperparameter-grid point.
    Hpo(HpoArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScaleArg {
    Fraction,
    Percent,
}

impl From<ScaleArg> for MetricScale {
    fn from(s: ScaleArg) -> Self {
        match s {
            ScaleArg::Fraction => MetricScale::Fraction,
            ScaleArg::Percent => MetricScale::Percent,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SortArg {
    Bleu,
    Ter,
    Chrf,
}

impl From<SortArg> for MetricName {
    fn from(s: SortArg) -> Self {
        match s {
            SortArg::Bleu => MetricName::Bleu,
            SortArg::Ter => MetricName::Ter,
            SortArg::Chrf => MetricName::Chrf,
        }
    }
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// System output, one segment per line.
    #[arg(long = "hyp", value_name = "FILE")]
    pub hypotheses: PathBuf,
    /// Reference translations, one segment per line.
    #[arg(long = "ref", value_name = "FILE")]
    pub references: PathBuf,
    /// Case-fold before scoring BLEU, TER and F1.
    #[arg(long)]
    pub lowercase: bool,
    /// ChrF recall weight.
    #[arg(long, default_value = "3", value_parser = ["1", "3"])]
    pub chrf_beta: String,
    /// Scale for TER, ChrF and F1.
    #[arg(long, value_enum, default_value = "fraction")]
    pub metric_scale: ScaleArg,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// JSON list of {team, system, bleu, ter, chrf, baseline} entries.
    #[arg(long, value_name = "FILE")]
    pub entries: PathBuf,
    /// System to compare against; defaults to the entry flagged `baseline`.
    #[arg(long, value_name = "SYSTEM")]
    pub baseline: Option<String>,
    #[arg(long, value_enum, default_value = "bleu")]
    pub sort: SortArg,
}

#[derive(Debug, Args)]
pub struct AgreeArgs {
    /// Annotation records, one JSON object per line.
    #[arg(long, value_name = "FILE")]
    pub annotations: PathBuf,
    #[arg(long)]
    pub system: String,
    /// Translation direction, e.g. en2ga.
    #[arg(long)]
    pub direction: String,
}

#[derive(Debug, Args)]
pub struct GreenArgs {
    /// Rated maximum GPU power draw.
    #[arg(long, default_value_t = 400.0)]
    pub power_watts: f64,
    /// Assumed fraction of maximum power drawn during the run.
    #[arg(long, default_value_t = lores_eval::green::DEFAULT_UTILIZATION)]
    pub utilization: f64,
    /// Wall-clock training time.
    #[arg(long)]
    pub hours: f64,
    /// Grid carbon intensity in kgCO2 per kWh.
    #[arg(
        long,
        conflicts_with = "carbon_neutral",
        required_unless_present = "carbon_neutral"
    )]
    pub intensity: Option<f64>,
    /// The run took place in a carbon-neutral region.
    #[arg(long)]
    pub carbon_neutral: bool,
    /// Label for the report row.
    #[arg(long, default_value = "run")]
    pub system: String,
    #[arg(long, default_value = "NVIDIA A100-SXM4-40GB")]
    pub gpu: String,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    #[arg(long, value_name = "FILE")]
    pub src: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub tgt: PathBuf,
    #[arg(long)]
    pub src_lang: String,
    #[arg(long)]
    pub tgt_lang: String,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Train, validation and test fractions.
    #[arg(long, default_value = "0.8,0.1,0.1")]
    pub ratio: String,
    /// Shuffle with this seed before splitting; without it file order is kept.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DedupArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Lowercase both sides before deduplicating.
    #[arg(long)]
    pub lowercase: bool,
    /// Output directory; files keep their input names.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct HpoArgs {
    /// Grid definition (JSON); defaults to the NLLB fine-tuning search space.
    #[arg(long, value_name = "FILE")]
    pub grid: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// JSON object merged under every trial's values.
    #[arg(long, value_name = "FILE")]
    pub template: Option<PathBuf>,
}

/// An error that carries its own exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(f) = cause.downcast_ref::<Failure>() {
            return f.code;
        }
        if let Some(e) = cause.downcast_ref::<CorpusError>() {
            return match e {
                CorpusError::Io { .. }
                | CorpusError::EmptyFile { .. }
                | CorpusError::Encoding { .. } => EXIT_FILE,
                CorpusError::LineCountMismatch { .. } => EXIT_ALIGNMENT,
                _ => EXIT_FAILURE,
            };
        }
        if let Some(e) = cause.downcast_ref::<MetricError>() {
            return match e {
                MetricError::LengthMismatch { .. } => EXIT_ALIGNMENT,
                _ => EXIT_FAILURE,
            };
        }
        if let Some(e) = cause.downcast_ref::<ReportError>() {
            return match e {
                ReportError::Io { .. } | ReportError::Json { .. } => EXIT_FILE,
                ReportError::EntryWithoutMetrics(_) => EXIT_FAILURE,
                _ => EXIT_COMPARE,
            };
        }
        if let Some(e) = cause.downcast_ref::<HumanEvalError>() {
            return match e {
                HumanEvalError::Io { .. } => EXIT_FILE,
                HumanEvalError::Schema { .. }
                | HumanEvalError::UnknownCategory { .. }
                | HumanEvalError::SqmOutOfRange { .. }
                | HumanEvalError::DuplicateKey { .. } => EXIT_SCHEMA,
                _ => EXIT_FAILURE,
            };
        }
        if let Some(e) = cause.downcast_ref::<HpoError>() {
            return match e {
                HpoError::Io { .. } | HpoError::Json { .. } => EXIT_FILE,
                _ => EXIT_FAILURE,
            };
        }
        if cause.downcast_ref::<GreenError>().is_some() {
            return EXIT_FAILURE;
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return EXIT_FILE;
        }
    }
    EXIT_FAILURE
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
