use std::collections::HashMap;
use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use super::tokenize::{tokenize, TokenScheme, TokenizerConfig};
use super::{check_aligned, MetricError, Result};

pub const MAX_BLEU_ORDER: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Smoothing {
    #[default]
    None,
    /// Add one to the match count and the total of any order with no matches.
    AddOneOnZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BleuConfig {
    pub max_order: usize,
    pub smoothing: Smoothing,
    pub lowercase: bool,
    #[serde(default)]
    pub scheme: TokenScheme,
}

impl Default for BleuConfig {
    fn default() -> Self {
        Self {
            max_order: 4,
            smoothing: Smoothing::None,
            lowercase: false,
            scheme: TokenScheme::SplitPunctuation,
        }
    }
}

impl BleuConfig {
    /// Default sentence-level configuration (add-one smoothing).
    pub fn sentence() -> Self {
        Self {
            smoothing: Smoothing::AddOneOnZero,
            ..Self::default()
        }
    }

    pub fn lowercase(mut self, lowercase: bool) -> Self {
        self.lowercase = lowercase;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if (1..=MAX_BLEU_ORDER).contains(&self.max_order) {
            Ok(())
        } else {
            Err(MetricError::InvalidConfig(format!(
                "BLEU max_order {} outside 1..={MAX_BLEU_ORDER}",
                self.max_order
            )))
        }
    }

    pub fn tokenizer(&self) -> TokenizerConfig {
        TokenizerConfig::new(self.scheme, self.lowercase)
    }
}

/// Integer sufficient statistics for BLEU. Pooling is plain addition, so
/// corpus scores do not depend on the order sentences are visited in.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BleuStats {
    pub matches: Vec<u64>,
    pub totals: Vec<u64>,
    pub hyp_len: u64,
    pub ref_len: u64,
}

impl BleuStats {
    pub fn zero(max_order: usize) -> Self {
        Self {
            matches: vec![0; max_order],
            totals: vec![0; max_order],
            hyp_len: 0,
            ref_len: 0,
        }
    }

    /// Clipped n-gram counts for one tokenized pair.
    pub fn from_tokens<T: AsRef<str>>(hyp: &[T], reference: &[T], max_order: usize) -> Self {
        let hyp: Vec<&str> = hyp.iter().map(AsRef::as_ref).collect();
        let reference: Vec<&str> = reference.iter().map(AsRef::as_ref).collect();
        let mut stats = Self::zero(max_order);
        stats.hyp_len = hyp.len() as u64;
        stats.ref_len = reference.len() as u64;
        for n in 1..=max_order {
            if hyp.len() < n {
                break;
            }
            let ref_counts = ngram_counts(&reference, n);
            let hyp_counts = ngram_counts(&hyp, n);
            stats.totals[n - 1] = (hyp.len() + 1 - n) as u64;
            stats.matches[n - 1] = hyp_counts
                .iter()
                .map(|(gram, &c)| c.min(ref_counts.get(gram).copied().unwrap_or(0)))
                .sum();
        }
        stats
    }

    /// BLEU on the 0-100 scale.
    pub fn score(&self, smoothing: Smoothing) -> f64 {
        if self.hyp_len == 0 || self.matches.is_empty() {
            return 0.0;
        }
        let mut log_sum = 0.0;
        for (&m, &t) in self.matches.iter().zip(&self.totals) {
            let precision = if m > 0 {
                m as f64 / t as f64
            } else {
                match smoothing {
                    Smoothing::None => return 0.0,
                    Smoothing::AddOneOnZero => 1.0 / (t + 1) as f64,
                }
            };
            log_sum += precision.ln();
        }
        let brevity = if self.hyp_len < self.ref_len {
            (1.0 - self.ref_len as f64 / self.hyp_len as f64).exp()
        } else {
            1.0
        };
        let score = 100.0 * brevity * (log_sum / self.matches.len() as f64).exp();
        score.clamp(0.0, 100.0)
    }
}

impl AddAssign<&BleuStats> for BleuStats {
    fn add_assign(&mut self, rhs: &BleuStats) {
        if self.matches.len() < rhs.matches.len() {
            self.matches.resize(rhs.matches.len(), 0);
            self.totals.resize(rhs.totals.len(), 0);
        }
        for (a, b) in self.matches.iter_mut().zip(&rhs.matches) {
            *a += b;
        }
        for (a, b) in self.totals.iter_mut().zip(&rhs.totals) {
            *a += b;
        }
        self.hyp_len += rhs.hyp_len;
        self.ref_len += rhs.ref_len;
    }
}

fn ngram_counts<'a>(tokens: &'a [&'a str], n: usize) -> HashMap<&'a [&'a str], u64> {
    let mut counts = HashMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

pub(crate) fn pair_stats(hyp: &str, reference: &str, config: &BleuConfig) -> BleuStats {
    let tok = config.tokenizer();
    BleuStats::from_tokens(
        &tokenize(hyp, &tok),
        &tokenize(reference, &tok),
        config.max_order,
    )
}

/// Corpus BLEU: n-gram statistics are pooled over all pairs before the
/// precisions and the brevity penalty are computed. The configured smoothing
/// is applied to the pooled counts, so the default unsmoothed configuration
/// returns 0 whenever some order has no matches in the whole corpus.
pub fn bleu_corpus<S: AsRef<str>>(
    hypotheses: &[S],
    references: &[S],
    config: &BleuConfig,
) -> Result<f64> {
    config.validate()?;
    check_aligned(hypotheses.len(), references.len())?;
    Ok(corpus_stats(hypotheses, references, config).score(config.smoothing))
}

pub(crate) fn corpus_stats<S: AsRef<str>>(
    hypotheses: &[S],
    references: &[S],
    config: &BleuConfig,
) -> BleuStats {
    let mut pooled = BleuStats::zero(config.max_order);
    for (h, r) in hypotheses.iter().zip(references) {
        pooled += &pair_stats(h.as_ref(), r.as_ref(), config);
    }
    pooled
}

/// Sentence BLEU with the configured smoothing.
pub fn bleu_sentence(hypothesis: &str, reference: &str, config: &BleuConfig) -> Result<f64> {
    config.validate()?;
    if hypothesis.is_empty() || reference.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    Ok(pair_stats(hypothesis, reference, config).score(config.smoothing))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_counted_example() {
        let stats = pair_stats(
            "the cat sat on the mat",
            "the cat sat on a mat",
            &BleuConfig::default(),
        );
        assert_eq!(stats.matches, [5, 3, 2, 1]);
        assert_eq!(stats.totals, [6, 5, 4, 3]);
        let expected = 100.0 * (1.0f64 / 12.0).powf(0.25);
        let got = bleu_corpus(
            &["the cat sat on the mat"],
            &["the cat sat on a mat"],
            &BleuConfig::default(),
        )
        .unwrap();
        assert!((got - expected).abs() < 1e-9);
        assert!((got - 53.7).abs() < 0.1);
    }

    #[test]
    fn identity_is_perfect() {
        let s = "Conas a scaipeann COVID-19 agus na comharthaí a bhaineann leis";
        assert_eq!(bleu_sentence(s, s, &BleuConfig::sentence()).unwrap(), 100.0);
        assert_eq!(bleu_sentence(s, s, &BleuConfig::default()).unwrap(), 100.0);
        assert_eq!(
            bleu_sentence("yes", "yes", &BleuConfig::sentence()).unwrap(),
            100.0
        );
    }

    #[test]
    fn disjoint_is_zero() {
        let got = bleu_sentence("a b c d", "w x y z", &BleuConfig::default()).unwrap();
        assert_eq!(got, 0.0);
    }

    #[test]
    fn smoothing_keeps_partial_matches_positive() {
        let hyp = "the cat sat down";
        let reference = "the cat lay down";
        assert_eq!(
            bleu_sentence(hyp, reference, &BleuConfig::default()).unwrap(),
            0.0
        );
        let smoothed = bleu_sentence(hyp, reference, &BleuConfig::sentence()).unwrap();
        // p = 3/4, 1/3, 1/3 (smoothed 0/2), 1/2 (smoothed 0/1)
        let expected = 100.0 * (0.75f64 * (1.0 / 3.0) * (1.0 / 3.0) * 0.5).powf(0.25);
        assert!((smoothed - expected).abs() < 1e-9);
    }

    #[test]
    fn brevity_penalty_applies_to_short_hypotheses() {
        let cfg = BleuConfig {
            max_order: 1,
            ..BleuConfig::default()
        };
        let got = bleu_corpus(&["a b"], &["a b c d"], &cfg).unwrap();
        assert!((got - 100.0 * (1.0f64 - 2.0).exp()).abs() < 1e-9);
    }

    #[test]
    fn lowercase_ignores_case() {
        let cfg = BleuConfig::default().lowercase(true);
        let refs = ["the quick brown fox jumps"];
        assert_eq!(
            bleu_corpus(&["THE Quick BROWN fox JUMPS"], &refs, &cfg).unwrap(),
            100.0
        );
    }

    #[test]
    fn errors() {
        assert!(matches!(
            bleu_corpus(&["a"], &["a", "b"], &BleuConfig::default()),
            Err(MetricError::LengthMismatch { .. })
        ));
        let empty: [&str; 0] = [];
        assert!(matches!(
            bleu_corpus(&empty, &empty, &BleuConfig::default()),
            Err(MetricError::EmptyInput)
        ));
        assert!(matches!(
            bleu_sentence("", "a", &BleuConfig::default()),
            Err(MetricError::EmptyInput)
        ));
        let bad = BleuConfig {
            max_order: 10,
            ..BleuConfig::default()
        };
        assert!(matches!(
            bleu_sentence("a", "a", &bad),
            Err(MetricError::InvalidConfig(_))
        ));
    }
}
