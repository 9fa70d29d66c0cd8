mod common;

use std::collections::BTreeMap;
use std::fs;
use std::thread;

use lores_eval::humaneval::{
    agreement_report, load_annotations, AnnotationRecord, HumanEvalError, MqmCategory, MqmError,
    SqmRating,
};
use lores_eval::reports::log_run;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

fn record(seg: usize, annotator: &str, errors: Vec<MqmError>) -> AnnotationRecord {
    AnnotationRecord {
        segment_id: format!("s{seg:02}"),
        annotator_id: annotator.into(),
        system_id: "sys".into(),
        direction: "en2ga".into(),
        sqm: SqmRating::new(3).unwrap(),
        errors,
    }
}

#[test]
fn agreement_matches_contingency_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut records = Vec::new();
    let mut labels: BTreeMap<(&str, usize), Vec<bool>> = BTreeMap::new();
    for seg in 0..30 {
        for annotator in ["A1", "A2"] {
            let mut errors = Vec::new();
            for cat in MqmCategory::ALL.iter().filter(|c| c.takes_severity()) {
                let hit = rng.gen_bool(0.3);
                labels
                    .entry((annotator, cat.index()))
                    .or_default()
                    .push(hit);
                if hit {
                    errors.push(MqmError::minor(*cat));
                }
            }
            records.push(record(seg, annotator, errors));
        }
    }
    let report = agreement_report(&records, "sys", "en2ga").unwrap();
    assert_eq!(report.segments, 30);
    assert_eq!(report.annotators, ["A1".to_string(), "A2".to_string()]);
    for cat in MqmCategory::ALL.iter().filter(|c| c.takes_severity()) {
        let a = &labels[&("A1", cat.index())];
        let b = &labels[&("A2", cat.index())];
        let (kappa, p_o, _) = common::kappa_oracle(a, b);
        let row = report.row(*cat);
        assert!((row.result.p_o - p_o).abs() < 1e-12);
        match (row.result.kappa, kappa) {
            (Some(x), Some(y)) => assert!((x - y).abs() < 1e-12, "{cat}: {x} vs {y}"),
            (x, y) => assert_eq!(x, y),
        }
    }
    // nobody used non-translation: perfect agreement, no kappa
    assert!(report
        .row(MqmCategory::NonTranslation)
        .result
        .is_degenerate());
}

#[test]
fn agreement_on_annotation_tallies_fixture() {
    let records = load_annotations(&common::fixture("annotation_tallies.jsonl")).unwrap();
    for direction in ["en2ga", "ga2en"] {
        let report = agreement_report(&records, "adaptMLLM", direction).unwrap();
        assert_eq!(report.segments, 25);
        assert_eq!(report.rows.len(), 11);
    }
}

#[test]
fn agreement_needs_two_annotators_on_the_same_segments() {
    let one = vec![record(1, "A1", vec![])];
    assert!(matches!(
        agreement_report(&one, "sys", "en2ga"),
        Err(HumanEvalError::AnnotatorCountNotTwo { .. })
    ));
    let unpaired = vec![record(1, "A1", vec![]), record(2, "A2", vec![])];
    assert!(matches!(
        agreement_report(&unpaired, "sys", "en2ga"),
        Err(HumanEvalError::UnpairedSegment { .. })
    ));
    assert!(matches!(
        agreement_report(&one, "other", "en2ga"),
        Err(HumanEvalError::NoMatchingRecords { .. })
    ));
}

#[test]
fn concurrent_log_appends_stay_whole() {
    let dir = tempfile::tempdir().unwrap();
    let threads: Vec<_> = (0..8)
        .map(|t| {
            let path = dir.path().to_path_buf();
            thread::spawn(move || {
                for i in 0..50 {
                    let payload = json!({"thread": t, "run": i, "pad": "x".repeat(512)});
                    log_run("evaluate", &payload, &path).unwrap();
                }
            })
        })
        .collect();
    for t in threads {
        t.join().unwrap();
    }
    let text = fs::read_to_string(dir.path().join("evaluate.jsonl")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 400);
    for line in lines {
        let v: Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["command"], "evaluate");
        assert!(v["timestamp"].is_string());
        assert_eq!(v["report"]["pad"].as_str().unwrap().len(), 512);
    }
}
