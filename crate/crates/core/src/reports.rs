//! System comparison tables and append-only run logs.

use std::cmp::Ordering;
use std::fmt;
use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{relative_improvement, round_to};

/// Environment variable that overrides the default log directory.
pub const LOG_DIR_ENV: &str = "LORES_EVAL_LOG_DIR";
pub const DEFAULT_LOG_DIR: &str = "logs";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("a comparison needs at least two entries, got {0}")]
    TooFewEntries(usize),
    #[error("entry `{0}` has no metric values")]
    EntryWithoutMetrics(String),
    #[error(
        "no baseline entry: pass --baseline <system> or flag one entry with \"baseline\": true"
    )]
    BaselineMissing,
    #[error("baseline system `{0}` is not among the entries")]
    BaselineNotFound(String),
    #[error("baseline `{0}` has no positive BLEU score")]
    BaselineWithoutBleu(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = ReportError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricName {
    Bleu,
    Ter,
    Chrf,
}

impl MetricName {
    pub fn higher_is_better(self) -> bool {
        !matches!(self, MetricName::Ter)
    }

    pub fn arrow(self) -> &'static str {
        if self.higher_is_better() {
            "↑"
        } else {
            "↓"
        }
    }
}

impl fmt::Display for MetricName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricName::Bleu => "bleu",
            MetricName::Ter => "ter",
            MetricName::Chrf => "chrf",
        })
    }
}

impl FromStr for MetricName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "bleu" => Ok(MetricName::Bleu),
            "ter" => Ok(MetricName::Ter),
            "chrf" => Ok(MetricName::Chrf),
            other => Err(format!("unknown metric `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemEntry {
    pub team: String,
    pub system: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bleu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ter: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chrf: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub baseline: bool,
}

impl SystemEntry {
    pub fn metric(&self, name: MetricName) -> Option<f64> {
        match name {
            MetricName::Bleu => self.bleu,
            MetricName::Ter => self.ter,
            MetricName::Chrf => self.chrf,
        }
    }
}

/// Entries file: either a bare array of entries or an object with an
/// `entries` array and an optional ChrF column label.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum EntriesFile {
    List(Vec<SystemEntry>),
    Table {
        entries: Vec<SystemEntry>,
        #[serde(default)]
        chrf_label: Option<String>,
    },
}

impl EntriesFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| ReportError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| ReportError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn into_parts(self) -> (Vec<SystemEntry>, Option<String>) {
        match self {
            EntriesFile::List(entries) => (entries, None),
            EntriesFile::Table {
                entries,
                chrf_label,
            } => (entries, chrf_label),
        }
    }
}

/// Relative improvement with one decimal and the rounded integer, e.g.
/// `38.7% (39%)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Improvement {
    pub percent: f64,
    pub rounded: i64,
}

impl Improvement {
    pub fn new(new_score: f64, baseline: f64) -> Option<Self> {
        relative_improvement(new_score, baseline)
            .ok()
            .map(|p| Self {
                percent: round_to(p, 1),
                rounded: p.round() as i64,
            })
    }
}

impl fmt::Display for Improvement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.1}% ({}%)", self.percent, self.rounded)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    #[serde(flatten)]
    pub entry: SystemEntry,
    /// BLEU change relative to the baseline entry.
    pub bleu_improvement: Option<Improvement>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
    pub sort_key: MetricName,
    pub baseline: String,
    pub chrf_label: String,
    /// Improvement of the top row over the baseline.
    pub top_improvement: Option<Improvement>,
}

impl ComparisonTable {
    /// Sorts entries by `sort_key` (ascending for TER, descending otherwise;
    /// entries without the metric last) and computes BLEU improvements over
    /// the baseline, named explicitly or flagged in the entries.
    pub fn new(
        entries: Vec<SystemEntry>,
        sort_key: MetricName,
        baseline: Option<&str>,
        chrf_label: Option<String>,
    ) -> Result<Self> {
        if entries.len() < 2 {
            return Err(ReportError::TooFewEntries(entries.len()));
        }
        if let Some(e) = entries
            .iter()
            .find(|e| e.bleu.is_none() && e.ter.is_none() && e.chrf.is_none())
        {
            return Err(ReportError::EntryWithoutMetrics(e.system.clone()));
        }
        let base = match baseline {
            Some(name) => entries
                .iter()
                .find(|e| e.system == name)
                .ok_or_else(|| ReportError::BaselineNotFound(name.to_string()))?,
            None => entries
                .iter()
                .find(|e| e.baseline)
                .ok_or(ReportError::BaselineMissing)?,
        };
        let base_name = base.system.clone();
        let base_bleu = base
            .bleu
            .filter(|&b| b > 0.0)
            .ok_or_else(|| ReportError::BaselineWithoutBleu(base_name.clone()))?;

        let mut entries = entries;
        entries.sort_by(|a, b| compare_entries(a, b, sort_key));
        let rows: Vec<ComparisonRow> = entries
            .into_iter()
            .map(|entry| ComparisonRow {
                bleu_improvement: entry.bleu.and_then(|v| Improvement::new(v, base_bleu)),
                entry,
            })
            .collect();
        let top_improvement = rows[0].bleu_improvement;
        Ok(Self {
            rows,
            sort_key,
            baseline: base_name,
            chrf_label: chrf_label.unwrap_or_else(|| "ChrF3".to_string()),
            top_improvement,
        })
    }

    pub fn render(&self) -> String {
        let header = vec![
            "Team".to_string(),
            "System".to_string(),
            format!("BLEU {}", MetricName::Bleu.arrow()),
            format!("TER {}", MetricName::Ter.arrow()),
            format!("{} {}", self.chrf_label, MetricName::Chrf.arrow()),
            format!("vs {}", self.baseline),
        ];
        let opt = |v: Option<f64>, decimals: usize| {
            v.map_or_else(|| "-".to_string(), |v| format!("{v:.decimals$}"))
        };
        let mut table: Vec<Vec<String>> = vec![header];
        for row in &self.rows {
            let e = &row.entry;
            table.push(vec![
                e.team.clone(),
                e.system.clone(),
                opt(e.bleu, 1),
                opt(e.ter, 3),
                opt(e.chrf, 3),
                if e.system == self.baseline {
                    "baseline".to_string()
                } else {
                    row.bleu_improvement
                        .map_or_else(|| "-".to_string(), |i| format!("{:+.1}%", i.percent))
                },
            ]);
        }
        let mut out = render_columns(&table, 2);
        if let Some(imp) = self.top_improvement {
            out.push_str(&format!(
                "{} vs {}: {} relative BLEU improvement\n",
                self.rows[0].entry.system, self.baseline, imp
            ));
        }
        out
    }
}

fn compare_entries(a: &SystemEntry, b: &SystemEntry, key: MetricName) -> Ordering {
    match (a.metric(key), b.metric(key)) {
        (Some(x), Some(y)) => {
            let ord = x.total_cmp(&y);
            if key.higher_is_better() {
                ord.reverse()
            } else {
                ord
            }
        }
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}

/// Left-aligns the first `text_columns` columns and right-aligns the rest.
pub fn render_columns(rows: &[Vec<String>], text_columns: usize) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                if c < text_columns {
                    format!("{cell:<w$}", w = widths[c])
                } else {
                    format!("{cell:>w$}", w = widths[c])
                }
            })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Log directory: an explicit choice, else `$LORES_EVAL_LOG_DIR`, else `logs`.
pub fn resolve_log_dir(explicit: Option<&Path>) -> PathBuf {
    if let Some(dir) = explicit {
        return dir.to_path_buf();
    }
    match std::env::var_os(LOG_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => PathBuf::from(DEFAULT_LOG_DIR),
    }
}

#[derive(Serialize)]
struct LogLine<'a, T: Serialize> {
    timestamp: String,
    command: &'a str,
    report: &'a T,
}

/// Appends one timestamped JSON line to `{log_dir}/{command}.jsonl`,
/// creating the directory if needed. Each line goes out in a single append
/// write, so concurrent writers never interleave partial lines.
pub fn log_run<T: Serialize>(command: &str, report: &T, log_dir: &Path) -> Result<PathBuf> {
    let path = log_dir.join(format!("{command}.jsonl"));
    let io_err = |source| ReportError::Io {
        path: path.clone(),
        source,
    };
    fs::create_dir_all(log_dir).map_err(|source| ReportError::Io {
        path: log_dir.to_path_buf(),
        source,
    })?;
    let line = LogLine {
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
        command,
        report,
    };
    let mut bytes = serde_json::to_vec(&line).map_err(|source| ReportError::Json {
        path: path.clone(),
        source,
    })?;
    bytes.push(b'\n');
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&path)
        .map_err(io_err)?;
    file.write_all(&bytes).map_err(io_err)?;
    Ok(path)
}
