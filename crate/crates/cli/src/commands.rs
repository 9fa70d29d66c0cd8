use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use lores_eval::corpus::{
    deduplicate, load_parallel, normalize_case, split, write_lines, Side, SplitRatio,
};
use lores_eval::green::{self, CarbonIntensity, EnergyReport, GpuProfile, RunRecord};
use lores_eval::hpo::{emit_configs, enumerate_grid, HyperparameterGrid};
use lores_eval::humaneval::{
    agreement_report, load_annotations, mqm_error_counts, mqm_weighted_score, sqm_mean,
    AgreementReport, CountTable, GroupBy, MqmScore,
};
use lores_eval::metrics::{evaluate_all, EvalConfig, MetricScale};
use lores_eval::reports::{log_run, render_columns, resolve_log_dir, ComparisonTable, EntriesFile};
use serde::Serialize;
use serde_json::Value;

use crate::{
    AgreeArgs, Cli, Command, CompareArgs, DedupArgs, EvaluateArgs, Failure, GreenArgs, HpoArgs,
    SplitArgs, EXIT_ALIGNMENT, EXIT_FILE,
};

pub fn run(cli: &Cli) -> Result<()> {
    let log_dir = resolve_log_dir(cli.log_dir.as_deref());
    match &cli.command {
        Command::Evaluate(args) => evaluate(args, cli.json, &log_dir),
        Command::Compare(args) => compare(args, cli.json, &log_dir),
        Command::Agree(args) => agree(args, cli.json, &log_dir),
        Command::Green(args) => green(args, cli.json, &log_dir),
        Command::Split(args) => split_corpus(args, cli.json, &log_dir),
        Command::Dedup(args) => dedup(args, cli.json, &log_dir),
        Command::Hpo(args) => hpo(args, cli.json, &log_dir),
    }
}

/// Prints `report` as JSON or as `table`, then appends it to the run log.
fn emit<T: Serialize>(
    command: &str,
    report: &T,
    table: &str,
    json: bool,
    log_dir: &Path,
) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(report)?);
    } else {
        print!("{table}");
    }
    log_run(command, report, log_dir)?;
    Ok(())
}

/// Reads a segment file line by line. Unlike corpus loading, blank lines are
/// kept: a system may legitimately output nothing for a segment.
fn read_lines(path: &Path) -> Result<Vec<String>> {
    let bytes =
        fs::read(path).map_err(|e| Failure::new(EXIT_FILE, format!("{}: {e}", path.display())))?;
    let mut lines = Vec::new();
    for (i, raw) in bytes.split(|&b| b == b'\n').enumerate() {
        let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
        let line = std::str::from_utf8(raw).map_err(|_| {
            Failure::new(
                EXIT_FILE,
                format!("{}: line {} is not valid UTF-8", path.display(), i + 1),
            )
        })?;
        lines.push(line.to_string());
    }
    // a trailing newline does not start another segment
    if bytes.is_empty() || bytes.ends_with(b"\n") {
        lines.pop();
    }
    if lines.is_empty() {
        return Err(Failure::new(EXIT_FILE, format!("{}: file is empty", path.display())).into());
    }
    Ok(lines)
}

fn evaluate(args: &EvaluateArgs, json: bool, log_dir: &Path) -> Result<()> {
    let hyps = read_lines(&args.hypotheses)?;
    let refs = read_lines(&args.references)?;
    if hyps.len() != refs.len() {
        let (longer, extra) = if hyps.len() > refs.len() {
            (&args.hypotheses, refs.len() + 1)
        } else {
            (&args.references, hyps.len() + 1)
        };
        return Err(Failure::new(
            EXIT_ALIGNMENT,
            format!(
                "{} hypotheses but {} references; line {extra} of {} has no counterpart",
                hyps.len(),
                refs.len(),
                longer.display()
            ),
        )
        .into());
    }
    let beta: f64 = args.chrf_beta.parse()?;
    let config = EvalConfig::default()
        .lowercase(args.lowercase)
        .chrf_beta(beta);
    let report = evaluate_all(&hyps, &refs, &config)?;
    let display = report.display(MetricScale::from(args.metric_scale));
    emit("evaluate", &display, &display.render_table(), json, log_dir)
}

fn compare(args: &CompareArgs, json: bool, log_dir: &Path) -> Result<()> {
    let (entries, chrf_label) = EntriesFile::load(&args.entries)?.into_parts();
    let table = ComparisonTable::new(
        entries,
        args.sort.into(),
        args.baseline.as_deref(),
        chrf_label,
    )?;
    emit("compare", &table, &table.render(), json, log_dir)
}

#[derive(Serialize)]
struct AgreeReport {
    system_id: String,
    direction: String,
    sqm_mean: f64,
    mqm: MqmScore,
    errors_by_annotator: CountTable,
    errors_by_category: CountTable,
    agreement: AgreementReport,
    categories_at_least_fair: usize,
}

impl AgreeReport {
    fn render(&self) -> String {
        let mut out = format!(
            "System {} ({}): {} segments, SQM mean {:.2}, MQM score {} ({:.2} per segment)\n\n",
            self.system_id,
            self.direction,
            self.mqm.segments,
            self.sqm_mean,
            self.mqm.total,
            self.mqm.per_segment
        );
        let counts = |table: &CountTable, header: &str| {
            let mut rows = vec![vec![header.to_string(), "Errors".to_string()]];
            rows.extend(
                table
                    .rows
                    .iter()
                    .map(|(k, v)| vec![k.clone(), v.to_string()]),
            );
            rows.push(vec!["Total".to_string(), table.total.to_string()]);
            render_columns(&rows, 1)
        };
        out.push_str(&counts(&self.errors_by_annotator, "Annotator"));
        out.push('\n');
        out.push_str(&counts(&self.errors_by_category, "Error type"));
        out.push('\n');
        let mut rows = vec![vec![
            "Error type".to_string(),
            "Kappa".to_string(),
            "Agreement".to_string(),
        ]];
        rows.extend(self.agreement.rows.iter().map(|r| {
            vec![
                r.category.name().to_string(),
                r.result.display_value(),
                r.result.band.label().to_string(),
            ]
        }));
        out.push_str(&render_columns(&rows, 1));
        out.push_str(&format!(
            "{} of {} categories at fair agreement or better\n",
            self.categories_at_least_fair,
            self.agreement.rows.len()
        ));
        out
    }
}

fn agree(args: &AgreeArgs, json: bool, log_dir: &Path) -> Result<()> {
    let records = load_annotations(&args.annotations)?;
    let (system, direction) = (args.system.as_str(), args.direction.as_str());
    let agreement = agreement_report(&records, system, direction)?;
    let report = AgreeReport {
        system_id: args.system.clone(),
        direction: args.direction.clone(),
        sqm_mean: sqm_mean(&records, system, direction)?,
        mqm: mqm_weighted_score(&records, system, direction)?,
        errors_by_annotator: mqm_error_counts(&records, system, direction, GroupBy::Annotator)?,
        errors_by_category: mqm_error_counts(&records, system, direction, GroupBy::Category)?,
        categories_at_least_fair: agreement.at_least_fair(),
        agreement,
    };
    emit("agree", &report, &report.render(), json, log_dir)
}

fn green(args: &GreenArgs, json: bool, log_dir: &Path) -> Result<()> {
    let gpu = GpuProfile::new(&args.gpu, args.power_watts, args.utilization)?;
    let run = RunRecord {
        system_id: args.system.clone(),
        runtime_hours: args.hours,
        region_carbon_intensity: CarbonIntensity::from_options(
            args.intensity,
            args.carbon_neutral,
        )?,
    };
    let report = EnergyReport::compute(run, gpu)?;
    let table = green::render_table(std::slice::from_ref(&report));
    emit("green", &report, &table, json, log_dir)
}

#[derive(Serialize)]
struct SplitSummary {
    ratio: String,
    seed: Option<u64>,
    train: usize,
    validation: usize,
    test: usize,
    duplicates_dropped: usize,
    files: Vec<PathBuf>,
}

fn split_corpus(args: &SplitArgs, json: bool, log_dir: &Path) -> Result<()> {
    let ratio: SplitRatio = args.ratio.parse()?;
    let c = &args.corpus;
    let corpus = load_parallel(&c.src, &c.tgt, &c.src_lang, &c.tgt_lang)?;
    let parts = split(&corpus, ratio, args.seed)?;
    let files = parts.write_to(&args.out)?;
    let summary = SplitSummary {
        ratio: ratio.to_string(),
        seed: args.seed,
        train: parts.train.len(),
        validation: parts.validation.len(),
        test: parts.test.len(),
        duplicates_dropped: parts.duplicates_dropped,
        files,
    };
    let table = render_columns(
        &[
            vec!["Split".into(), "Pairs".into()],
            vec!["train".into(), summary.train.to_string()],
            vec!["valid".into(), summary.validation.to_string()],
            vec!["test".into(), summary.test.to_string()],
            vec![
                "duplicates dropped".into(),
                summary.duplicates_dropped.to_string(),
            ],
        ],
        1,
    );
    emit("split", &summary, &table, json, log_dir)
}

#[derive(Serialize)]
struct DedupSummary {
    input_pairs: usize,
    kept: usize,
    removed: usize,
    lowercased: bool,
    files: [PathBuf; 2],
}

fn dedup(args: &DedupArgs, json: bool, log_dir: &Path) -> Result<()> {
    let c = &args.corpus;
    let mut corpus = load_parallel(&c.src, &c.tgt, &c.src_lang, &c.tgt_lang)?;
    if args.lowercase {
        corpus = normalize_case(&corpus, Side::Both);
    }
    let (unique, removed) = deduplicate(&corpus);
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let out_path = |input: &Path| -> Result<PathBuf> {
        let name = input
            .file_name()
            .with_context(|| format!("{} has no file name", input.display()))?;
        let out = args.out.join(name);
        anyhow::ensure!(
            fs::canonicalize(&out).ok() != fs::canonicalize(input).ok(),
            "refusing to overwrite input file {}",
            input.display()
        );
        Ok(out)
    };
    let files = [out_path(&c.src)?, out_path(&c.tgt)?];
    write_lines(&files[0], unique.source())?;
    write_lines(&files[1], unique.target())?;
    let summary = DedupSummary {
        input_pairs: corpus.len(),
        kept: unique.len(),
        removed,
        lowercased: args.lowercase,
        files,
    };
    let table = format!(
        "{} pairs in, {} kept, {} duplicates removed\n",
        summary.input_pairs, summary.kept, summary.removed
    );
    emit("dedup", &summary, &table, json, log_dir)
}

#[derive(Serialize)]
struct HpoSummary {
    trials: usize,
    files_written: usize,
    out_dir: PathBuf,
}

fn hpo(args: &HpoArgs, json: bool, log_dir: &Path) -> Result<()> {
    let grid = match &args.grid {
        Some(path) => HyperparameterGrid::from_file(path)?,
        None => HyperparameterGrid::nllb_search_space(),
    };
    let template: Value = match &args.template {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::new(EXIT_FILE, format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::new(EXIT_FILE, format!("{}: {e}", path.display())))?
        }
        None => Value::Object(Default::default()),
    };
    let trials = enumerate_grid(&grid)?;
    let written = emit_configs(&trials, &args.out, &template)?;
    let summary = HpoSummary {
        trials: trials.len(),
        files_written: written,
        out_dir: args.out.clone(),
    };
    let table = format!(
        "{} trials, {} config files written to {}\n",
        summary.trials,
        summary.files_written,
        summary.out_dir.display()
    );
    emit("hpo", &summary, &table, json, log_dir)
}
