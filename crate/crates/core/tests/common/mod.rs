//! Brute-force reference computations used to check the library. Everything
//! here is written from the metric definitions, without calling into the
//! implementation under test.

#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn ngrams(tokens: &[String], n: usize) -> Vec<Vec<String>> {
    if tokens.len() < n {
        return Vec::new();
    }
    (0..=tokens.len() - n)
        .map(|i| tokens[i..i + n].to_vec())
        .collect()
}

fn occurrences<T: PartialEq>(items: &[T], x: &T) -> usize {
    items.iter().filter(|y| *y == x).count()
}

/// Clipped n-gram matches and hypothesis n-gram count, by linear scans.
fn clipped(hyp: &[String], reference: &[String], n: usize) -> (usize, usize) {
    let h = ngrams(hyp, n);
    let r = ngrams(reference, n);
    let mut distinct: Vec<Vec<String>> = Vec::new();
    for g in &h {
        if !distinct.contains(g) {
            distinct.push(g.clone());
        }
    }
    let matches = distinct
        .iter()
        .map(|g| occurrences(&h, g).min(occurrences(&r, g)))
        .sum();
    (matches, h.len())
}

pub fn words(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}

/// Unsmoothed corpus BLEU (0-100) over whitespace tokens.
pub fn bleu_oracle(hyps: &[String], refs: &[String], max_order: usize) -> f64 {
    let mut matches = vec![0usize; max_order];
    let mut totals = vec![0usize; max_order];
    let (mut h_len, mut r_len) = (0usize, 0usize);
    for (h, r) in hyps.iter().zip(refs) {
        let (h, r) = (words(h), words(r));
        h_len += h.len();
        r_len += r.len();
        for n in 1..=max_order {
            let (m, t) = clipped(&h, &r, n);
            matches[n - 1] += m;
            totals[n - 1] += t;
        }
    }
    if matches.contains(&0) {
        return 0.0;
    }
    let product: f64 = matches
        .iter()
        .zip(&totals)
        .map(|(&m, &t)| m as f64 / t as f64)
        .product();
    let bp = if h_len < r_len {
        (1.0 - r_len as f64 / h_len as f64).exp()
    } else {
        1.0
    };
    100.0 * bp * product.powf(1.0 / max_order as f64)
}

/// Full-matrix Levenshtein distance.
pub fn levenshtein(a: &[String], b: &[String]) -> usize {
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

/// Every sequence reachable from `tokens` by one block move of at most
/// `max_span` tokens, as `(start, len, dest, result)` in search order.
pub fn all_single_shifts(
    tokens: &[String],
    max_span: usize,
) -> Vec<(usize, usize, usize, Vec<String>)> {
    let n = tokens.len();
    let mut out = Vec::new();
    for start in 0..n {
        for len in 1..=max_span.min(n - start) {
            let mut rest = tokens.to_vec();
            let span: Vec<String> = rest.drain(start..start + len).collect();
            for dest in 0..=rest.len() {
                if dest == start {
                    continue;
                }
                let mut moved = rest.clone();
                for (k, tok) in span.iter().enumerate() {
                    moved.insert(dest + k, tok.clone());
                }
                out.push((start, len, dest, moved));
            }
        }
    }
    out
}

/// Greedy shift search by exhaustive enumeration; returns total edits.
pub fn ter_edits_oracle(hyp: &[String], reference: &[String]) -> usize {
    let mut current = hyp.to_vec();
    let mut dist = levenshtein(&current, reference);
    let mut shifts = 0;
    while shifts < 50 {
        let best = all_single_shifts(&current, 10)
            .into_iter()
            .map(|(_, _, _, moved)| (levenshtein(&moved, reference), moved))
            .fold(None::<(usize, Vec<String>)>, |best, cand| match best {
                Some(b) if b.0 <= cand.0 => Some(b),
                _ => Some(cand),
            });
        match best {
            Some((d, moved)) if d + 1 < dist => {
                current = moved;
                dist = d;
                shifts += 1;
            }
            _ => break,
        }
    }
    shifts + dist
}

pub fn ter_corpus_oracle(hyps: &[String], refs: &[String]) -> f64 {
    let mut edits = 0;
    let mut ref_len = 0;
    for (h, r) in hyps.iter().zip(refs) {
        edits += ter_edits_oracle(&words(h), &words(r));
        ref_len += words(r).len();
    }
    edits as f64 / ref_len as f64
}

fn char_ngrams(s: &str, n: usize) -> Vec<String> {
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.len() < n {
        return Vec::new();
    }
    (0..=chars.len() - n)
        .map(|i| chars[i..i + n].iter().collect())
        .collect()
}

/// Pooled corpus ChrF with whitespace stripped, averaging precision and
/// recall over the orders where both sides have n-grams.
pub fn chrf_oracle(hyps: &[String], refs: &[String], char_order: usize, beta: f64) -> f64 {
    let (mut p_sum, mut r_sum, mut orders) = (0.0, 0.0, 0);
    for n in 1..=char_order {
        let (mut m, mut th, mut tr) = (0usize, 0usize, 0usize);
        for (h, r) in hyps.iter().zip(refs) {
            let hg = char_ngrams(h, n);
            let rg = char_ngrams(r, n);
            let mut distinct: Vec<&String> = Vec::new();
            for g in &hg {
                if !distinct.contains(&g) {
                    distinct.push(g);
                }
            }
            m += distinct
                .iter()
                .map(|g| occurrences(&hg, g).min(occurrences(&rg, g)))
                .sum::<usize>();
            th += hg.len();
            tr += rg.len();
        }
        if th > 0 && tr > 0 {
            p_sum += m as f64 / th as f64;
            r_sum += m as f64 / tr as f64;
            orders += 1;
        }
    }
    if orders == 0 {
        return 0.0;
    }
    let (p, r) = (p_sum / orders as f64, r_sum / orders as f64);
    let b2 = beta * beta;
    if b2 * p + r == 0.0 {
        0.0
    } else {
        (1.0 + b2) * p * r / (b2 * p + r)
    }
}

/// Kappa from an explicit 2x2 contingency table. `None` when chance
/// agreement is 1.
pub fn kappa_oracle(a: &[bool], b: &[bool]) -> (Option<f64>, f64, f64) {
    let mut table = [[0usize; 2]; 2];
    for (&x, &y) in a.iter().zip(b) {
        table[usize::from(x)][usize::from(y)] += 1;
    }
    let n = a.len() as f64;
    let p_o = (table[0][0] + table[1][1]) as f64 / n;
    let a_yes = (table[1][0] + table[1][1]) as f64 / n;
    let b_yes = (table[0][1] + table[1][1]) as f64 / n;
    let p_e = a_yes * b_yes + (1.0 - a_yes) * (1.0 - b_yes);
    let degenerate = (table[0][0] + table[1][1] == a.len())
        && (table[0][0] == a.len() || table[1][1] == a.len());
    let kappa = (!degenerate).then(|| (p_o - p_e) / (1.0 - p_e));
    (kappa, p_o, p_e)
}

/// A random sentence of `1..=max_len` words over a small vocabulary, so
/// that n-gram matches are common.
pub fn random_sentence<R: Rng>(rng: &mut R, max_len: usize) -> String {
    const VOCAB: [&str; 7] = ["an", "the", "cat", "sat", "mat", "on", "teach"];
    let len = rng.gen_range(1..=max_len);
    (0..len)
        .map(|_| VOCAB[rng.gen_range(0..VOCAB.len())])
        .collect::<Vec<_>>()
        .join(" ")
}

/// Hypothesis/reference lists of `1..=max_pairs` pairs.
pub fn random_corpus<R: Rng>(
    rng: &mut R,
    max_pairs: usize,
    max_len: usize,
) -> (Vec<String>, Vec<String>) {
    let pairs = rng.gen_range(1..=max_pairs);
    (0..pairs)
        .map(|_| (random_sentence(rng, max_len), random_sentence(rng, max_len)))
        .unzip()
}
