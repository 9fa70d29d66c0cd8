//! Automatic translation metrics: BLEU, TER, ChrF and unigram F1.
//!
//! Corpus-level scores are computed from integer sufficient statistics that
//! are summed over sentence pairs before any division, so they are identical
//! for any ordering or parallel evaluation of the pairs.

mod bleu;
mod chrf;
mod f1;
mod ter;
mod tokenize;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bleu::{bleu_corpus, bleu_sentence, BleuConfig, BleuStats, Smoothing, MAX_BLEU_ORDER};
pub use chrf::{chrf, chrf_corpus, ChrfConfig, ChrfStats};
pub use f1::{unigram_f1, unigram_overlap};
pub use ter::{
    ter, ter_corpus, ter_stats_tokens, word_edit_distance, TerStats, MAX_SHIFTS, MAX_SHIFT_SPAN,
};
pub use tokenize::{tokenize, TokenScheme, TokenizerConfig};

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("{hypotheses} hypotheses but {references} references")]
    LengthMismatch {
        hypotheses: usize,
        references: usize,
    },
    #[error("empty input")]
    EmptyInput,
    #[error("reference has no tokens")]
    EmptyReference,
    #[error("invalid metric configuration: {0}")]
    InvalidConfig(String),
    #[error("baseline score must be positive, got {0}")]
    ZeroBaseline(f64),
}

pub type Result<T, E = MetricError> = std::result::Result<T, E>;

pub(crate) fn check_aligned(hypotheses: usize, references: usize) -> Result<()> {
    if hypotheses != references {
        return Err(MetricError::LengthMismatch {
            hypotheses,
            references,
        });
    }
    if hypotheses == 0 {
        return Err(MetricError::EmptyInput);
    }
    Ok(())
}

/// Percentage change of `new_score` over `baseline`, sign preserved.
pub fn relative_improvement(new_score: f64, baseline: f64) -> Result<f64> {
    if !(baseline.is_finite() && baseline > 0.0) {
        return Err(MetricError::ZeroBaseline(baseline));
    }
    Ok(100.0 * (new_score - baseline) / baseline)
}

/// Rounds half away from zero to `decimals` places.
pub fn round_to(value: f64, decimals: i32) -> f64 {
    let factor = 10f64.powi(decimals);
    (value * factor).round() / factor
}

/// Configuration of every metric in a [`MetricReport`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub bleu: BleuConfig,
    pub ter: TokenizerConfig,
    pub chrf: ChrfConfig,
    pub f1: TokenizerConfig,
}

impl EvalConfig {
    /// Applies case folding to every token-based metric.
    pub fn lowercase(mut self, lowercase: bool) -> Self {
        self.bleu.lowercase = lowercase;
        self.ter.lowercase = lowercase;
        self.f1.lowercase = lowercase;
        self
    }

    pub fn chrf_beta(mut self, beta: f64) -> Self {
        self.chrf.beta = beta;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub bleu: f64,
    /// Fraction scale.
    pub ter: f64,
    pub chrf: f64,
    pub f1: f64,
    pub n_segments: usize,
    pub configs: EvalConfig,
}

/// Corpus BLEU, corpus TER, pooled ChrF and mean sentence F1.
pub fn evaluate_all<S: AsRef<str> + Sync>(
    hypotheses: &[S],
    references: &[S],
    configs: &EvalConfig,
) -> Result<MetricReport> {
    configs.bleu.validate()?;
    configs.chrf.validate()?;
    check_aligned(hypotheses.len(), references.len())?;

    struct PairStats {
        bleu: BleuStats,
        ter: TerStats,
        chrf: ChrfStats,
        f1: f64,
    }
    let per_pair: Vec<PairStats> = hypotheses
        .par_iter()
        .zip(references.par_iter())
        .map(|(h, r)| {
            let (h, r) = (h.as_ref(), r.as_ref());
            PairStats {
                bleu: bleu::pair_stats(h, r, &configs.bleu),
                ter: ter::pair_stats(h, r, &configs.ter),
                chrf: ChrfStats::from_text(h, r, &configs.chrf),
                f1: f1::pair_f1(h, r, &configs.f1),
            }
        })
        .collect();

    let mut bleu = BleuStats::zero(configs.bleu.max_order);
    let mut ter = TerStats::default();
    let mut chrf = ChrfStats::default();
    let mut f1_sum = 0.0;
    for p in &per_pair {
        bleu += &p.bleu;
        ter += &p.ter;
        chrf += &p.chrf;
        f1_sum += p.f1;
    }
    Ok(MetricReport {
        bleu: bleu.score(configs.bleu.smoothing),
        ter: ter.score()?,
        chrf: chrf.score(configs.chrf.beta),
        f1: f1_sum / per_pair.len() as f64,
        n_segments: per_pair.len(),
        configs: *configs,
    })
}

/// Display scale for TER, ChrF and F1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricScale {
    #[default]
    Fraction,
    Percent,
}

impl FromStr for MetricScale {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "fraction" => Ok(MetricScale::Fraction),
            "percent" => Ok(MetricScale::Percent),
            other => Err(format!("unknown metric scale `{other}`")),
        }
    }
}

impl fmt::Display for MetricScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricScale::Fraction => "fraction",
            MetricScale::Percent => "percent",
        })
    }
}

/// Report values rounded for display: BLEU to one decimal, the fraction-scale
/// metrics to three decimals (one decimal once scaled to percent).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplayReport {
    pub bleu: f64,
    pub ter: f64,
    pub chrf: f64,
    pub f1: f64,
    pub n_segments: usize,
    pub metric_scale: MetricScale,
    pub configs: EvalConfig,
}

impl MetricReport {
    pub fn display(&self, scale: MetricScale) -> DisplayReport {
        let (factor, decimals) = match scale {
            MetricScale::Fraction => (1.0, 3),
            MetricScale::Percent => (100.0, 1),
        };
        let fmt = |v: f64| round_to(v * factor, decimals);
        DisplayReport {
            bleu: round_to(self.bleu, 1),
            ter: fmt(self.ter),
            chrf: fmt(self.chrf),
            f1: fmt(self.f1),
            n_segments: self.n_segments,
            metric_scale: scale,
            configs: self.configs,
        }
    }
}

impl DisplayReport {
    /// Aligned plain-text table with per-metric direction markers.
    pub fn render_table(&self) -> String {
        let decimals = match self.metric_scale {
            MetricScale::Fraction => 3,
            MetricScale::Percent => 1,
        };
        let chrf_label = format!("{} ↑", self.configs.chrf.label());
        let rows = [
            ("BLEU ↑".to_string(), format!("{:.1}", self.bleu)),
            ("TER ↓".to_string(), format!("{:.*}", decimals, self.ter)),
            (chrf_label, format!("{:.*}", decimals, self.chrf)),
            ("F1 ↑".to_string(), format!("{:.*}", decimals, self.f1)),
            ("Segments".to_string(), self.n_segments.to_string()),
        ];
        let width = rows
            .iter()
            .map(|(k, _)| k.chars().count())
            .max()
            .unwrap_or(0);
        let mut out = String::new();
        for (k, v) in rows {
            let pad = width - k.chars().count();
            out.push_str(&format!("{k}{}  {v:>8}\n", " ".repeat(pad)));
        }
        let b = &self.configs.bleu;
        out.push_str(&format!(
            "BLEU: max_order={} smoothing={:?} lowercase={} tokenizer={}\n",
            b.max_order, b.smoothing, b.lowercase, b.scheme
        ));
        out.push_str(&format!(
            "TER: tokenizer={} lowercase={} | ChrF: char_order={} beta={} strip_whitespace={}\n",
            self.configs.ter.scheme,
            self.configs.ter.lowercase,
            self.configs.chrf.char_order,
            self.configs.chrf.beta,
            self.configs.chrf.strip_whitespace
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounded_improvements() {
        let r = |a, b| relative_improvement(a, b).unwrap();
        assert_eq!(r(41.2, 29.7).round(), 39.0);
        assert_eq!(r(75.1, 47.8).round(), 57.0);
        assert_eq!(round_to(r(41.2, 38.7), 1), 6.5);
        assert!(r(20.0, 40.0) < 0.0);
    }

    #[test]
    fn zero_baseline() {
        assert_eq!(
            relative_improvement(1.0, 0.0),
            Err(MetricError::ZeroBaseline(0.0))
        );
        assert!(relative_improvement(1.0, -2.0).is_err());
    }

    #[test]
    fn identical_corpora_are_perfect() {
        let refs = ["the cat sat on the mat", "a dog barked twice"];
        let r = evaluate_all(&refs, &refs, &EvalConfig::default()).unwrap();
        assert_eq!((r.bleu, r.ter, r.chrf, r.f1), (100.0, 0.0, 1.0, 1.0));
        assert_eq!(r.n_segments, 2);
    }

    #[test]
    fn single_pair_matches_sentence_level() {
        let h = ["the cat sat on the mat today"];
        let r = ["the cat sat on a mat"];
        let cfg = EvalConfig::default();
        let rep = evaluate_all(&h, &r, &cfg).unwrap();
        assert_eq!(rep.bleu, bleu_corpus(&h, &r, &cfg.bleu).unwrap());
        assert_eq!(rep.ter, ter(h[0], r[0], &cfg.ter).unwrap());
        assert_eq!(rep.chrf, chrf(h[0], r[0], &cfg.chrf).unwrap());
        assert_eq!(rep.f1, unigram_f1(h[0], r[0], &cfg.f1).unwrap());
    }

    #[test]
    fn display_rounding_and_scale() {
        let rep = MetricReport {
            bleu: 41.23,
            ter: 0.48912,
            chrf: 0.65349,
            f1: 0.5,
            n_segments: 3,
            configs: EvalConfig::default(),
        };
        let d = rep.display(MetricScale::Fraction);
        assert_eq!((d.bleu, d.ter, d.chrf), (41.2, 0.489, 0.653));
        let p = rep.display(MetricScale::Percent);
        assert_eq!((p.ter, p.chrf, p.f1), (48.9, 65.3, 50.0));
        let table = d.render_table();
        assert!(table.contains("BLEU ↑"));
        assert!(table.contains("TER ↓"));
        assert!(table.contains("ChrF3 ↑"));
        assert!(table.contains("0.489"));
    }
}
