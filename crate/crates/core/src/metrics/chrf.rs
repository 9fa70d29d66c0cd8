use std::collections::HashMap;
use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use super::{check_aligned, MetricError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChrfConfig {
    pub char_order: usize,
    pub beta: f64,
    pub strip_whitespace: bool,
}

impl Default for ChrfConfig {
    fn default() -> Self {
        Self {
            char_order: 6,
            beta: 3.0,
            strip_whitespace: true,
        }
    }
}

impl ChrfConfig {
    pub fn with_beta(beta: f64) -> Self {
        Self {
            beta,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.char_order == 0 {
            return Err(MetricError::InvalidConfig(
                "ChrF char_order must be >= 1".into(),
            ));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(MetricError::InvalidConfig(format!(
                "ChrF beta {} must be positive",
                self.beta
            )));
        }
        Ok(())
    }

    /// `ChrF1`, `ChrF3`, ...
    pub fn label(&self) -> String {
        if self.beta.fract() == 0.0 {
            format!("ChrF{}", self.beta as u64)
        } else {
            format!("ChrF{}", self.beta)
        }
    }
}

/// Per-order character n-gram counts: `(matches, hyp_total, ref_total)`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ChrfStats {
    pub orders: Vec<(u64, u64, u64)>,
}

impl ChrfStats {
    pub fn from_text(hyp: &str, reference: &str, config: &ChrfConfig) -> Self {
        let chars = |s: &str| -> Vec<char> {
            if config.strip_whitespace {
                s.chars().filter(|c| !c.is_whitespace()).collect()
            } else {
                s.chars().collect()
            }
        };
        let hyp = chars(hyp);
        let reference = chars(reference);
        let orders = (1..=config.char_order)
            .map(|n| {
                let h = char_ngrams(&hyp, n);
                let r = char_ngrams(&reference, n);
                let matches = h
                    .iter()
                    .map(|(g, &c)| c.min(r.get(g).copied().unwrap_or(0)))
                    .sum();
                (
                    matches,
                    hyp.len().saturating_sub(n - 1) as u64,
                    reference.len().saturating_sub(n - 1) as u64,
                )
            })
            .collect();
        Self { orders }
    }

    /// F-score on the fraction scale.
    ///
    /// Precision and recall are averaged over the orders for which both the
    /// hypothesis and the reference contain at least one n-gram, so strings
    /// shorter than `char_order` are still scored on the orders they have.
    pub fn score(&self, beta: f64) -> f64 {
        let (mut p_sum, mut r_sum, mut effective) = (0.0, 0.0, 0usize);
        for &(m, h, r) in &self.orders {
            if h == 0 || r == 0 {
                continue;
            }
            p_sum += m as f64 / h as f64;
            r_sum += m as f64 / r as f64;
            effective += 1;
        }
        if effective == 0 {
            return 0.0;
        }
        let p = p_sum / effective as f64;
        let r = r_sum / effective as f64;
        let b2 = beta * beta;
        let denom = b2 * p + r;
        if denom <= 0.0 {
            0.0
        } else {
            ((1.0 + b2) * p * r / denom).clamp(0.0, 1.0)
        }
    }
}

impl AddAssign<&ChrfStats> for ChrfStats {
    fn add_assign(&mut self, rhs: &ChrfStats) {
        if self.orders.len() < rhs.orders.len() {
            self.orders.resize(rhs.orders.len(), (0, 0, 0));
        }
        for (a, b) in self.orders.iter_mut().zip(&rhs.orders) {
            a.0 += b.0;
            a.1 += b.1;
            a.2 += b.2;
        }
    }
}

fn char_ngrams(chars: &[char], n: usize) -> HashMap<&[char], u64> {
    let mut counts = HashMap::new();
    for gram in chars.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

/// Sentence ChrF on the fraction scale.
pub fn chrf(hypothesis: &str, reference: &str, config: &ChrfConfig) -> Result<f64> {
    config.validate()?;
    if hypothesis.is_empty() || reference.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    Ok(ChrfStats::from_text(hypothesis, reference, config).score(config.beta))
}

/// Corpus ChrF from n-gram counts pooled over all pairs.
pub fn chrf_corpus<S: AsRef<str>>(
    hypotheses: &[S],
    references: &[S],
    config: &ChrfConfig,
) -> Result<f64> {
    config.validate()?;
    check_aligned(hypotheses.len(), references.len())?;
    Ok(corpus_stats(hypotheses, references, config).score(config.beta))
}

pub(crate) fn corpus_stats<S: AsRef<str>>(
    hypotheses: &[S],
    references: &[S],
    config: &ChrfConfig,
) -> ChrfStats {
    let mut pooled = ChrfStats::default();
    for (h, r) in hypotheses.iter().zip(references) {
        pooled += &ChrfStats::from_text(h.as_ref(), r.as_ref(), config);
    }
    pooled
}
