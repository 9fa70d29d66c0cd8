use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::records::AnnotationRecord;
use super::taxonomy::MqmCategory;
use super::{HumanEvalError, Result};

fn matching<'a>(
    records: &'a [AnnotationRecord],
    system_id: &str,
    direction: &str,
) -> Result<Vec<&'a AnnotationRecord>> {
    let found: Vec<_> = records
        .iter()
        .filter(|r| r.matches(system_id, direction))
        .collect();
    if found.is_empty() {
        return Err(HumanEvalError::NoMatchingRecords {
            system_id: system_id.to_string(),
            direction: direction.to_string(),
        });
    }
    Ok(found)
}

/// Mean SQM rating over all annotators' records for a system and direction.
pub fn sqm_mean(records: &[AnnotationRecord], system_id: &str, direction: &str) -> Result<f64> {
    let found = matching(records, system_id, direction)?;
    let sum: u64 = found.iter().map(|r| u64::from(r.sqm.value())).sum();
    Ok(sum as f64 / found.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupBy {
    Annotator,
    Category,
}

impl FromStr for GroupBy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "annotator" => Ok(GroupBy::Annotator),
            "category" => Ok(GroupBy::Category),
            other => Err(format!("unknown grouping `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    pub group_by: GroupBy,
    pub rows: Vec<(String, u64)>,
    pub total: u64,
}

impl CountTable {
    pub fn get(&self, label: &str) -> Option<u64> {
        self.rows.iter().find(|(l, _)| l == label).map(|&(_, c)| c)
    }
}

/// Error tallies per annotator (sorted by id) or per leaf category, summed
/// over annotators and listed in taxonomy order.
pub fn mqm_error_counts(
    records: &[AnnotationRecord],
    system_id: &str,
    direction: &str,
    group_by: GroupBy,
) -> Result<CountTable> {
    let found = matching(records, system_id, direction)?;
    let rows: Vec<(String, u64)> = match group_by {
        GroupBy::Annotator => {
            let mut per: BTreeMap<&str, u64> = BTreeMap::new();
            for r in &found {
                *per.entry(r.annotator_id.as_str()).or_insert(0) += r.errors.len() as u64;
            }
            per.into_iter().map(|(a, c)| (a.to_string(), c)).collect()
        }
        GroupBy::Category => {
            let mut per = [0u64; 11];
            for e in found.iter().flat_map(|r| &r.errors) {
                per[e.category.index()] += 1;
            }
            MqmCategory::ALL
                .iter()
                .map(|c| (c.name().to_string(), per[c.index()]))
                .collect()
        }
    };
    let total = rows.iter().map(|(_, c)| c).sum();
    Ok(CountTable {
        group_by,
        rows,
        total,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MqmScore {
    pub total: f64,
    /// Total divided by the number of distinct segments, so two annotators
    /// of the same segment do not double the denominator.
    pub per_segment: f64,
    pub segments: usize,
}

/// Severity-weighted MQM error score.
pub fn mqm_weighted_score(
    records: &[AnnotationRecord],
    system_id: &str,
    direction: &str,
) -> Result<MqmScore> {
    let found = matching(records, system_id, direction)?;
    let total: u64 = found
        .iter()
        .flat_map(|r| &r.errors)
        .map(|e| u64::from(e.weight()))
        .sum();
    let segments = found
        .iter()
        .map(|r| r.segment_id.as_str())
        .collect::<BTreeSet<_>>()
        .len();
    Ok(MqmScore {
        total: total as f64,
        per_segment: total as f64 / segments as f64,
        segments,
    })
}
