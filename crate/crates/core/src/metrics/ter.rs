//! Translation edit rate with greedy phrase shifts.
//!
//! The hypothesis is repeatedly rewritten by the single block move that
//! lowers the word-level edit distance to the reference the most, as long as
//! the move pays for itself (its own unit cost included). Candidates are all
//! spans of up to [`MAX_SHIFT_SPAN`] tokens moved to any other position; ties
//! go to the earliest span start, then the shortest span, then the earliest
//! destination. At most [`MAX_SHIFTS`] moves are made.

use std::collections::HashMap;
use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use super::tokenize::{tokenize, TokenizerConfig};
use super::{check_aligned, MetricError, Result};

pub const MAX_SHIFT_SPAN: usize = 10;
pub const MAX_SHIFTS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TerStats {
    /// Shifts plus insertions, deletions and substitutions.
    pub edits: u64,
    pub shifts: u64,
    pub ref_len: u64,
}

impl TerStats {
    pub fn score(&self) -> Result<f64> {
        if self.ref_len == 0 {
            return Err(MetricError::EmptyReference);
        }
        Ok(self.edits as f64 / self.ref_len as f64)
    }
}

impl AddAssign<&TerStats> for TerStats {
    fn add_assign(&mut self, rhs: &TerStats) {
        self.edits += rhs.edits;
        self.shifts += rhs.shifts;
        self.ref_len += rhs.ref_len;
    }
}

/// Interns the tokens of one pair so distances compare integers.
fn intern<'a, T: AsRef<str>>(hyp: &'a [T], reference: &'a [T]) -> (Vec<u32>, Vec<u32>) {
    let mut ids: HashMap<&'a str, u32> = HashMap::new();
    let mut encoded = [
        Vec::with_capacity(reference.len()),
        Vec::with_capacity(hyp.len()),
    ];
    for (out, tokens) in encoded.iter_mut().zip([reference, hyp]) {
        for t in tokens {
            let next = ids.len() as u32;
            out.push(*ids.entry(t.as_ref()).or_insert(next));
        }
    }
    let [reference, hyp] = encoded;
    (hyp, reference)
}

/// Levenshtein distance, or `None` as soon as it is known to be at least
/// `limit`.
fn bounded_distance(a: &[u32], b: &[u32], limit: usize) -> Option<usize> {
    if a.len().abs_diff(b.len()) >= limit {
        return None;
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0; b.len() + 1];
    for (i, &x) in a.iter().enumerate() {
        curr[0] = i + 1;
        let mut row_min = curr[0];
        for (j, &y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            curr[j + 1] = sub.min(prev[j + 1] + 1).min(curr[j] + 1);
            row_min = row_min.min(curr[j + 1]);
        }
        if row_min >= limit {
            return None;
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    Some(prev[b.len()]).filter(|&d| d < limit)
}

fn distance(a: &[u32], b: &[u32]) -> usize {
    bounded_distance(a, b, usize::MAX).expect("unbounded distance")
}

/// Word-level Levenshtein distance without shifts.
pub fn word_edit_distance<T: AsRef<str>>(hyp: &[T], reference: &[T]) -> usize {
    let (h, r) = intern(hyp, reference);
    distance(&h, &r)
}

fn shifted(tokens: &[u32], start: usize, len: usize, dest: usize, out: &mut Vec<u32>) {
    out.clear();
    let span = &tokens[start..start + len];
    let rest = tokens[..start].iter().chain(&tokens[start + len..]);
    let mut rest = rest.copied();
    out.extend(rest.by_ref().take(dest));
    out.extend_from_slice(span);
    out.extend(rest);
}

/// Edit statistics for one tokenized pair.
pub fn ter_stats_tokens<T: AsRef<str>>(hyp: &[T], reference: &[T]) -> TerStats {
    let (mut current, reference_ids) = intern(hyp, reference);
    let mut dist = distance(&current, &reference_ids);
    let mut shifts = 0usize;
    let mut candidate = Vec::with_capacity(current.len());
    while shifts < MAX_SHIFTS && dist > 1 {
        let n = current.len();
        // (distance, start, len, dest)
        let mut best: Option<(usize, usize, usize, usize)> = None;
        for start in 0..n {
            for len in 1..=MAX_SHIFT_SPAN.min(n - start) {
                for dest in 0..=(n - len) {
                    if dest == start {
                        continue;
                    }
                    // a move must beat the current distance by more than its own cost
                    let limit = best.map_or(dist - 1, |b| b.0);
                    shifted(&current, start, len, dest, &mut candidate);
                    if let Some(d) = bounded_distance(&candidate, &reference_ids, limit) {
                        best = Some((d, start, len, dest));
                    }
                }
            }
        }
        let Some((d, start, len, dest)) = best else {
            break;
        };
        shifted(&current, start, len, dest, &mut candidate);
        std::mem::swap(&mut current, &mut candidate);
        dist = d;
        shifts += 1;
    }
    TerStats {
        edits: (shifts + dist) as u64,
        shifts: shifts as u64,
        ref_len: reference.len() as u64,
    }
}

pub(crate) fn pair_stats(hyp: &str, reference: &str, tokenizer: &TokenizerConfig) -> TerStats {
    ter_stats_tokens(&tokenize(hyp, tokenizer), &tokenize(reference, tokenizer))
}

/// Sentence TER on the fraction scale (0.51, not 51).
pub fn ter(hypothesis: &str, reference: &str, tokenizer: &TokenizerConfig) -> Result<f64> {
    pair_stats(hypothesis, reference, tokenizer).score()
}

/// Corpus TER: total edits over total reference tokens.
pub fn ter_corpus<S: AsRef<str> + Sync>(
    hypotheses: &[S],
    references: &[S],
    tokenizer: &TokenizerConfig,
) -> Result<f64> {
    check_aligned(hypotheses.len(), references.len())?;
    corpus_stats(hypotheses, references, tokenizer).score()
}

pub(crate) fn corpus_stats<S: AsRef<str> + Sync>(
    hypotheses: &[S],
    references: &[S],
    tokenizer: &TokenizerConfig,
) -> TerStats {
    use rayon::prelude::*;
    let per_pair: Vec<TerStats> = hypotheses
        .par_iter()
        .zip(references.par_iter())
        .map(|(h, r)| pair_stats(h.as_ref(), r.as_ref(), tokenizer))
        .collect();
    let mut pooled = TerStats::default();
    for s in &per_pair {
        pooled += s;
    }
    pooled
}
