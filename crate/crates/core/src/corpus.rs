//! Parallel corpus loading, deduplication, case normalization and
//! train/validation/test splitting.
//!
//! Corpora are line-aligned: line `i` of the source file translates line `i`
//! of the target file. Segment indices are the 0-based line numbers of the
//! original files and survive deduplication and splitting, so any segment can
//! be traced back to its input line.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance used when checking that split fractions sum to one.
pub const RATIO_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: file is empty")]
    EmptyFile { path: PathBuf },
    #[error("{path}: line {line} is not valid UTF-8")]
    Encoding { path: PathBuf, line: usize },
    #[error("{path}: line {line} is empty or whitespace-only")]
    BlankLine { path: PathBuf, line: usize },
    #[error("line count mismatch: source has {source_lines} lines, target has {target_lines}")]
    LineCountMismatch {
        source_lines: usize,
        target_lines: usize,
    },
    #[error("segment {index} contains a newline")]
    EmbeddedNewline { index: usize },
    #[error("language code must not be empty")]
    MissingLanguage,
    #[error("invalid split ratio: {0}")]
    RatioInvalid(String),
    #[error("corpus too small to split: {available} pairs available, at least {needed} required")]
    CorpusTooSmall { needed: usize, available: usize },
}

pub type Result<T, E = CorpusError> = std::result::Result<T, E>;

/// One line of one side of a parallel corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub index: usize,
    pub text: String,
}

/// Line-aligned source/target segments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelCorpus {
    source: Vec<Segment>,
    target: Vec<Segment>,
    source_lang: String,
    target_lang: String,
}

impl ParallelCorpus {
    /// Builds a corpus from aligned text pairs, numbering them from zero.
    pub fn from_pairs<I, S, T>(source_lang: &str, target_lang: &str, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        let (source, target) = pairs
            .into_iter()
            .enumerate()
            .map(|(index, (s, t))| {
                (
                    Segment {
                        index,
                        text: s.into(),
                    },
                    Segment {
                        index,
                        text: t.into(),
                    },
                )
            })
            .unzip();
        Self::from_segments(source_lang, target_lang, source, target)
    }

    fn from_segments(
        source_lang: &str,
        target_lang: &str,
        source: Vec<Segment>,
        target: Vec<Segment>,
    ) -> Result<Self> {
        if source_lang.trim().is_empty() || target_lang.trim().is_empty() {
            return Err(CorpusError::MissingLanguage);
        }
        if source.len() != target.len() {
            return Err(CorpusError::LineCountMismatch {
                source_lines: source.len(),
                target_lines: target.len(),
            });
        }
        if let Some(seg) = source
            .iter()
            .chain(target.iter())
            .find(|s| s.text.contains(['\n', '\r']))
        {
            return Err(CorpusError::EmbeddedNewline { index: seg.index });
        }
        Ok(Self {
            source,
            target,
            source_lang: source_lang.to_string(),
            target_lang: target_lang.to_string(),
        })
    }

    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    pub fn source(&self) -> &[Segment] {
        &self.source
    }

    pub fn target(&self) -> &[Segment] {
        &self.target
    }

    pub fn source_lang(&self) -> &str {
        &self.source_lang
    }

    pub fn target_lang(&self) -> &str {
        &self.target_lang
    }

    /// Iterates over aligned `(source, target)` text pairs.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.source
            .iter()
            .zip(&self.target)
            .map(|(s, t)| (s.text.as_str(), t.text.as_str()))
    }

    fn select(&self, positions: &[usize]) -> Self {
        Self {
            source: positions.iter().map(|&i| self.source[i].clone()).collect(),
            target: positions.iter().map(|&i| self.target[i].clone()).collect(),
            source_lang: self.source_lang.clone(),
            target_lang: self.target_lang.clone(),
        }
    }
}

/// Reads one side of a corpus. LF and CRLF line endings are accepted and a
/// single trailing newline does not produce an extra segment.
pub fn read_segments(path: &Path) -> Result<Vec<Segment>> {
    let bytes = fs::read(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    if bytes.is_empty() {
        return Err(CorpusError::EmptyFile {
            path: path.to_path_buf(),
        });
    }
    let mut lines: Vec<&[u8]> = bytes.split(|&b| b == b'\n').collect();
    if lines.last().is_some_and(|l| l.is_empty()) {
        lines.pop();
    }
    lines
        .into_iter()
        .enumerate()
        .map(|(index, raw)| {
            let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
            let text = std::str::from_utf8(raw).map_err(|_| CorpusError::Encoding {
                path: path.to_path_buf(),
                line: index + 1,
            })?;
            if text.trim().is_empty() {
                return Err(CorpusError::BlankLine {
                    path: path.to_path_buf(),
                    line: index + 1,
                });
            }
            Ok(Segment {
                index,
                text: text.to_string(),
            })
        })
        .collect()
}

/// Loads a parallel corpus from two line-aligned files.
pub fn load_parallel(
    source_path: &Path,
    target_path: &Path,
    source_lang: &str,
    target_lang: &str,
) -> Result<ParallelCorpus> {
    let source = read_segments(source_path)?;
    let target = read_segments(target_path)?;
    ParallelCorpus::from_segments(source_lang, target_lang, source, target)
}

/// Removes repeated `(source, target)` pairs, keeping the first occurrence.
///
/// Pairs are compared after trimming trailing whitespace on both sides; a
/// repeated source with a different target is not a duplicate.
pub fn deduplicate(corpus: &ParallelCorpus) -> (ParallelCorpus, usize) {
    let mut seen = HashSet::with_capacity(corpus.len());
    let keep: Vec<usize> = corpus
        .pairs()
        .enumerate()
        .filter(|(_, (s, t))| seen.insert((s.trim_end(), t.trim_end())))
        .map(|(i, _)| i)
        .collect();
    let removed = corpus.len() - keep.len();
    (corpus.select(&keep), removed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Source,
    Target,
    Both,
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "source" | "src" => Ok(Side::Source),
            "target" | "tgt" => Ok(Side::Target),
            "both" => Ok(Side::Both),
            other => Err(format!("unknown side `{other}`")),
        }
    }
}

/// Unicode-aware lowercasing of the selected side(s).
pub fn normalize_case(corpus: &ParallelCorpus, side: Side) -> ParallelCorpus {
    let lower = |segs: &[Segment], apply: bool| -> Vec<Segment> {
        segs.iter()
            .map(|s| Segment {
                index: s.index,
                text: if apply {
                    s.text.to_lowercase()
                } else {
                    s.text.clone()
                },
            })
            .collect()
    };
    ParallelCorpus {
        source: lower(&corpus.source, matches!(side, Side::Source | Side::Both)),
        target: lower(&corpus.target, matches!(side, Side::Target | Side::Both)),
        source_lang: corpus.source_lang.clone(),
        target_lang: corpus.target_lang.clone(),
    }
}

/// Fractions of the corpus assigned to each split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatio {
    train: f64,
    validation: f64,
    test: f64,
}

impl SplitRatio {
    pub fn new(train: f64, validation: f64, test: f64) -> Result<Self> {
        if ![train, validation, test].iter().all(|f| f.is_finite()) {
            return Err(CorpusError::RatioInvalid("fractions must be finite".into()));
        }
        if !(train > 0.0 && train < 1.0) {
            return Err(CorpusError::RatioInvalid(format!(
                "train fraction {train} must lie in (0, 1)"
            )));
        }
        for (name, f) in [("validation", validation), ("test", test)] {
            if !(0.0..1.0).contains(&f) {
                return Err(CorpusError::RatioInvalid(format!(
                    "{name} fraction {f} must lie in [0, 1)"
                )));
            }
        }
        let sum = train + validation + test;
        if (sum - 1.0).abs() > RATIO_SUM_TOLERANCE {
            return Err(CorpusError::RatioInvalid(format!(
                "fractions sum to {sum}, expected 1"
            )));
        }
        Ok(Self {
            train,
            validation,
            test,
        })
    }

    pub fn train(&self) -> f64 {
        self.train
    }

    pub fn validation(&self) -> f64 {
        self.validation
    }

    pub fn test(&self) -> f64 {
        self.test
    }

    /// Segment counts `(train, validation, test)` for a corpus of `n` pairs:
    /// validation and test are floored, train takes the remainder.
    pub fn sizes(&self, n: usize) -> (usize, usize, usize) {
        let part = |f: f64| {
            // absorbs products such as 0.29 * 100 = 28.999999999999996
            ((n as f64) * f + 1e-9).floor() as usize
        };
        let validation = part(self.validation);
        let test = part(self.test);
        (n - validation - test, validation, test)
    }

    fn positive_parts(&self) -> usize {
        [self.train, self.validation, self.test]
            .iter()
            .filter(|&&f| f > 0.0)
            .count()
    }
}

impl fmt::Display for SplitRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.train, self.validation, self.test)
    }
}

impl FromStr for SplitRatio {
    type Err = CorpusError;

    /// Parses `train,validation,test`, e.g. `0.8,0.1,0.1`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split([',', '/']).map(str::trim).collect();
        let [train, validation, test] = parts.as_slice() else {
            return Err(CorpusError::RatioInvalid(format!(
                "expected three fractions, got `{s}`"
            )));
        };
        let parse = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| CorpusError::RatioInvalid(format!("`{v}` is not a number")))
        };
        Self::new(parse(train)?, parse(validation)?, parse(test)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitCorpus {
    pub train: ParallelCorpus,
    pub validation: ParallelCorpus,
    pub test: ParallelCorpus,
    /// Pairs dropped because they repeated a pair already placed in a split.
    pub duplicates_dropped: usize,
}

impl SplitCorpus {
    pub fn total(&self) -> usize {
        self.train.len() + self.validation.len() + self.test.len()
    }

    /// Writes `{train,valid,test}.{source_lang,target_lang}` with LF endings.
    pub fn write_to(&self, out_dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(out_dir).map_err(|source| CorpusError::Io {
            path: out_dir.to_path_buf(),
            source,
        })?;
        let mut written = Vec::with_capacity(6);
        for (name, part) in [
            ("train", &self.train),
            ("valid", &self.validation),
            ("test", &self.test),
        ] {
            let src = out_dir.join(format!("{name}.{}", part.source_lang));
            let tgt = out_dir.join(format!("{name}.{}", part.target_lang));
            write_lines(&src, &part.source)?;
            write_lines(&tgt, &part.target)?;
            written.push(src);
            written.push(tgt);
        }
        Ok(written)
    }
}

/// Writes one segment per line, LF-terminated.
pub fn write_lines(path: &Path, segments: &[Segment]) -> Result<()> {
    let io_err = |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut out = io::BufWriter::new(file);
    for seg in segments {
        out.write_all(seg.text.as_bytes()).map_err(io_err)?;
        out.write_all(b"\n").map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

/// Splits a corpus into train, validation and test parts.
///
/// Duplicate pairs are removed first, so no pair can land in two parts and
/// the part sizes are computed on the deduplicated count. With a seed the
/// deduplicated pairs are permuted by a Fisher-Yates shuffle driven by
/// ChaCha8 seeded from the value; without one, file order is kept. Parts are
/// then sliced in the order train, validation, test.
pub fn split(corpus: &ParallelCorpus, ratio: SplitRatio, seed: Option<u64>) -> Result<SplitCorpus> {
    let (unique, duplicates_dropped) = deduplicate(corpus);
    let n = unique.len();
    let needed = ratio.positive_parts();
    if n < needed {
        return Err(CorpusError::CorpusTooSmall {
            needed,
            available: n,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    if let Some(seed) = seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        order.shuffle(&mut rng);
    }
    let (n_train, n_validation, _) = ratio.sizes(n);
    let (train, rest) = order.split_at(n_train);
    let (validation, test) = rest.split_at(n_validation);
    Ok(SplitCorpus {
        train: unique.select(train),
        validation: unique.select(validation),
        test: unique.select(test),
        duplicates_dropped,
    })
}
