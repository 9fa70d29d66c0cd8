use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::kappa::{cohen_kappa, KappaResult};
use super::records::AnnotationRecord;
use super::taxonomy::MqmCategory;
use super::{HumanEvalError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementRow {
    pub category: MqmCategory,
    #[serde(flatten)]
    pub result: KappaResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub system_id: String,
    pub direction: String,
    pub annotators: [String; 2],
    pub segments: usize,
    pub rows: Vec<AgreementRow>,
}

impl AgreementReport {
    pub fn row(&self, category: MqmCategory) -> &AgreementRow {
        &self.rows[category.index()]
    }

    pub fn at_least_fair(&self) -> usize {
        count_at_least_fair(self.rows.iter())
    }
}

/// Number of rows whose band is fair or better, perfect observed agreement
/// included.
pub fn count_at_least_fair<'a, I>(rows: I) -> usize
where
    I: IntoIterator<Item = &'a AgreementRow>,
{
    rows.into_iter()
        .filter(|r| r.result.band.at_least_fair())
        .count()
}

/// Per-category Cohen's kappa between the two annotators of a system.
///
/// Each annotator's labels are binarized per segment: a segment is positive
/// for a category when the annotator marked at least one error of it. Both
/// annotators must have rated the same set of segments.
pub fn agreement_report(
    records: &[AnnotationRecord],
    system_id: &str,
    direction: &str,
) -> Result<AgreementReport> {
    // annotator -> segment -> per-category presence
    let mut by_annotator: BTreeMap<&str, BTreeMap<&str, [bool; 11]>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.matches(system_id, direction)) {
        let mut present = [false; 11];
        for e in &r.errors {
            present[e.category.index()] = true;
        }
        by_annotator
            .entry(r.annotator_id.as_str())
            .or_default()
            .insert(r.segment_id.as_str(), present);
    }
    if by_annotator.is_empty() {
        return Err(HumanEvalError::NoMatchingRecords {
            system_id: system_id.to_string(),
            direction: direction.to_string(),
        });
    }
    if by_annotator.len() != 2 {
        return Err(HumanEvalError::AnnotatorCountNotTwo {
            found: by_annotator.keys().map(|s| s.to_string()).collect(),
        });
    }
    let mut it = by_annotator.into_iter();
    let (name_a, segs_a) = it.next().expect("two annotators");
    let (name_b, segs_b) = it.next().expect("two annotators");

    let keys_a: BTreeSet<&str> = segs_a.keys().copied().collect();
    let keys_b: BTreeSet<&str> = segs_b.keys().copied().collect();
    if let Some(seg) = keys_a.symmetric_difference(&keys_b).next() {
        let missing_from = if keys_a.contains(seg) { name_b } else { name_a };
        return Err(HumanEvalError::UnpairedSegment {
            segment_id: seg.to_string(),
            annotator_id: missing_from.to_string(),
        });
    }

    let rows = MqmCategory::ALL
        .iter()
        .map(|&category| {
            let i = category.index();
            let a: Vec<bool> = keys_a.iter().map(|s| segs_a[s][i]).collect();
            let b: Vec<bool> = keys_a.iter().map(|s| segs_b[s][i]).collect();
            cohen_kappa(&a, &b).map(|result| AgreementRow { category, result })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(AgreementReport {
        system_id: system_id.to_string(),
        direction: direction.to_string(),
        annotators: [name_a.to_string(), name_b.to_string()],
        segments: keys_a.len(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::humaneval::kappa::KappaBand;
    use crate::humaneval::records::{MqmError, SqmRating};

    fn rec(seg: usize, annotator: &str, errors: Vec<MqmError>) -> AnnotationRecord {
        AnnotationRecord {
            segment_id: seg.to_string(),
            annotator_id: annotator.into(),
            system_id: "tuned".into(),
            direction: "en2ga".into(),
            sqm: SqmRating::new(4).unwrap(),
            errors,
        }
    }

    #[test]
    fn clean_categories_are_degenerate() {
        let recs: Vec<_> = (0..25)
            .flat_map(|s| [rec(s, "A1", vec![]), rec(s, "A2", vec![])])
            .collect();
        let report = agreement_report(&recs, "tuned", "en2ga").unwrap();
        assert_eq!(report.rows.len(), 11);
        assert_eq!(report.segments, 25);
        for row in &report.rows {
            assert_eq!(row.result.band, KappaBand::DegeneratePerfect);
            assert_eq!(row.result.p_o, 1.0);
        }
        assert_eq!(report.at_least_fair(), 11);
    }

    #[test]
    fn repeated_errors_collapse_for_binarization() {
        let g = || MqmError::minor(MqmCategory::Grammar);
        let recs = vec![
            rec(1, "A", vec![g(), g(), g()]),
            rec(1, "B", vec![g()]),
            rec(2, "A", vec![]),
            rec(2, "B", vec![]),
        ];
        let report = agreement_report(&recs, "tuned", "en2ga").unwrap();
        assert_eq!(report.row(MqmCategory::Grammar).result.kappa, Some(1.0));
    }

    #[test]
    fn annotator_count_must_be_two() {
        let one = vec![rec(1, "A", vec![])];
        assert!(matches!(
            agreement_report(&one, "tuned", "en2ga"),
            Err(HumanEvalError::AnnotatorCountNotTwo { .. })
        ));
        let three = vec![
            rec(1, "A", vec![]),
            rec(1, "B", vec![]),
            rec(1, "C", vec![]),
        ];
        match agreement_report(&three, "tuned", "en2ga") {
            Err(HumanEvalError::AnnotatorCountNotTwo { found }) => assert_eq!(found.len(), 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unpaired_segment() {
        let recs = vec![
            rec(1, "A", vec![]),
            rec(1, "B", vec![]),
            rec(2, "A", vec![]),
        ];
        match agreement_report(&recs, "tuned", "en2ga") {
            Err(HumanEvalError::UnpairedSegment {
                segment_id,
                annotator_id,
            }) => assert_eq!((segment_id.as_str(), annotator_id.as_str()), ("2", "B")),
            other => panic!("unexpected {other:?}"),
        }
    }
}
