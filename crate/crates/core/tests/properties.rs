mod common;

use lores_eval::corpus::{normalize_case, ParallelCorpus, Side};
use lores_eval::hpo::{enumerate_grid, HyperparameterGrid};
use lores_eval::humaneval::cohen_kappa;
use lores_eval::metrics::{
    chrf, ter_stats_tokens, tokenize, word_edit_distance, ChrfConfig, TokenScheme, TokenizerConfig,
};

use proptest::prelude::*;

fn sentence() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(
        prop::sample::select(vec!["a", "b", "c", "an", "tí", "Dia"]),
        1..12,
    )
    .prop_map(|w| w.into_iter().map(String::from).collect())
}

proptest! {
    #[test]
    fn kappa_is_symmetric(pairs in prop::collection::vec(any::<(bool, bool)>(), 1..60)) {
        let (a, b): (Vec<bool>, Vec<bool>) = pairs.into_iter().unzip();
        let ab = cohen_kappa(&a, &b).unwrap();
        let ba = cohen_kappa(&b, &a).unwrap();
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn ter_edits_bounded_by_levenshtein(hyp in sentence(), reference in sentence()) {
        let stats = ter_stats_tokens(&hyp, &reference);
        let lev = word_edit_distance(&hyp, &reference);
        prop_assert_eq!(lev, common::levenshtein(&hyp, &reference));
        prop_assert!(stats.edits <= lev as u64);
        prop_assert_eq!(stats.ref_len, reference.len() as u64);
        prop_assert_eq!(stats.edits, common::ter_edits_oracle(&hyp, &reference) as u64);
    }

    #[test]
    fn chrf_ignores_spacing(hyp in sentence(), reference in sentence(), gap in 1usize..4) {
        let cfg = ChrfConfig::default();
        let tight = chrf(&hyp.join(" "), &reference.join(" "), &cfg).unwrap();
        let loose = chrf(&hyp.join(&" ".repeat(gap)), &format!(" {} ", reference.join("\t")), &cfg).unwrap();
        prop_assert_eq!(tight, loose);
    }

    #[test]
    fn lowercasing_is_idempotent(words in prop::collection::vec("[A-Za-zÁÉÍÓÚáéíóú]{1,6}", 1..8)) {
        let line = words.join(" ");
        let corpus = ParallelCorpus::from_pairs("en", "ga", [(line.clone(), line)]).unwrap();
        let once = normalize_case(&corpus, Side::Both);
        let twice = normalize_case(&once, Side::Both);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn whitespace_tokens_roundtrip(words in prop::collection::vec("[a-z]{1,5}", 0..8)) {
        let cfg = TokenizerConfig::new(TokenScheme::WhitespaceOnly, false);
        prop_assert_eq!(tokenize(&words.join("  "), &cfg), words);
    }

    #[test]
    fn grid_enumeration_is_a_bijection(
        epochs in prop::collection::btree_set(1u32..20, 1..4),
        batch in prop::collection::btree_set(1u32..64, 1..4),
        accum in prop::collection::btree_set(1u32..16, 1..3),
        precision in prop::collection::btree_set(any::<bool>(), 1..3),
    ) {
        let grid = HyperparameterGrid {
            epochs: epochs.iter().copied().collect(),
            batch_size: batch.iter().copied().collect(),
            grad_accum_steps: accum.iter().copied().collect(),
            learning_rate: vec![1e-5, 3e-5],
            weight_decay: vec![0.1],
            mixed_precision: precision.iter().copied().collect(),
            seed: None,
        };
        let trials = enumerate_grid(&grid).unwrap();
        prop_assert_eq!(trials.len(), grid.trial_count());
        let mut seen = std::collections::BTreeSet::new();
        for (i, t) in trials.iter().enumerate() {
            prop_assert_eq!(t.trial_index, i);
            prop_assert!(seen.insert((t.epochs, t.batch_size, t.grad_accum_steps,
                t.learning_rate.to_bits(), t.mixed_precision)));
        }
        for &e in &epochs { for &b in &batch { for &g in &accum { for &m in &precision {
            for lr in [1e-5f64, 3e-5] {
                prop_assert!(seen.contains(&(e, b, g, lr.to_bits(), m)));
            }
        }}}}
    }
}
