use std::collections::HashMap;

use super::tokenize::{tokenize, TokenizerConfig};
use super::{MetricError, Result};

/// Clipped unigram overlap: `(matches, hyp_len, ref_len)`.
pub fn unigram_overlap<T: AsRef<str>>(hyp: &[T], reference: &[T]) -> (usize, usize, usize) {
    let mut ref_counts: HashMap<&str, usize> = HashMap::new();
    for t in reference {
        *ref_counts.entry(t.as_ref()).or_insert(0) += 1;
    }
    let mut matches = 0;
    for t in hyp {
        if let Some(c) = ref_counts.get_mut(t.as_ref()) {
            if *c > 0 {
                *c -= 1;
                matches += 1;
            }
        }
    }
    (matches, hyp.len(), reference.len())
}

pub(crate) fn f1_from_overlap((matches, hyp_len, ref_len): (usize, usize, usize)) -> f64 {
    if matches == 0 {
        return 0.0;
    }
    let p = matches as f64 / hyp_len as f64;
    let r = matches as f64 / ref_len as f64;
    2.0 * p * r / (p + r)
}

pub(crate) fn pair_f1(hyp: &str, reference: &str, tokenizer: &TokenizerConfig) -> f64 {
    f1_from_overlap(unigram_overlap(
        &tokenize(hyp, tokenizer),
        &tokenize(reference, tokenizer),
    ))
}

/// Harmonic mean of clipped unigram precision and recall.
pub fn unigram_f1(hypothesis: &str, reference: &str, tokenizer: &TokenizerConfig) -> Result<f64> {
    if hypothesis.is_empty() || reference.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    Ok(pair_f1(hypothesis, reference, tokenizer))
}
