use std::collections::HashSet;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::taxonomy::{MqmCategory, Severity, NON_TRANSLATION_WEIGHT};
use super::{HumanEvalError, Result};

/// Scalar quality rating on the 0 to 6 scale. Levels 0, 2, 4 and 6 are
/// anchored; 1, 3 and 5 sit between them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct SqmRating(u8);

impl SqmRating {
    pub const MAX: u8 = 6;

    pub fn new(value: i64) -> Option<Self> {
        (0..=i64::from(Self::MAX))
            .contains(&value)
            .then_some(Self(value as u8))
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// Description of an anchored level; `None` for 1, 3 and 5.
    pub fn level_description(self) -> Option<&'static str> {
        match self.0 {
            6 => Some("Perfect meaning and grammar"),
            4 => Some("Most meaning preserved and few grammar mistakes"),
            2 => Some("Some meaning preserved"),
            0 => Some("Nonsense/no meaning preserved"),
            _ => None,
        }
    }
}

impl TryFrom<i64> for SqmRating {
    type Error = String;

    fn try_from(value: i64) -> std::result::Result<Self, Self::Error> {
        Self::new(value).ok_or_else(|| format!("SQM rating {value} outside 0..=6"))
    }
}

impl From<SqmRating> for u8 {
    fn from(r: SqmRating) -> u8 {
        r.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MqmError {
    pub category: MqmCategory,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub severity: Option<Severity>,
    /// Character range `[start, end)` in the hypothesis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<[usize; 2]>,
}

impl MqmError {
    /// Builds an error, enforcing that severity is present exactly when the
    /// category takes one.
    pub fn new(
        category: MqmCategory,
        severity: Option<Severity>,
    ) -> std::result::Result<Self, String> {
        match (category.takes_severity(), severity) {
            (true, None) => Err(format!("{category} error requires a severity")),
            (false, Some(_)) => Err(format!("{category} error takes no severity")),
            _ => Ok(Self {
                category,
                severity,
                span: None,
            }),
        }
    }

    pub fn minor(category: MqmCategory) -> Self {
        Self::new(category, Some(Severity::Minor)).expect("category takes a severity")
    }

    pub fn major(category: MqmCategory) -> Self {
        Self::new(category, Some(Severity::Major)).expect("category takes a severity")
    }

    pub fn non_translation() -> Self {
        Self::new(MqmCategory::NonTranslation, None).expect("non-translation has no severity")
    }

    pub fn with_span(mut self, start: usize, end: usize) -> Self {
        self.span = Some([start, end]);
        self
    }

    pub fn weight(&self) -> u32 {
        match self.severity {
            Some(s) => s.weight(),
            None => NON_TRANSLATION_WEIGHT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub segment_id: String,
    pub annotator_id: String,
    pub system_id: String,
    pub direction: String,
    pub sqm: SqmRating,
    pub errors: Vec<MqmError>,
}

impl AnnotationRecord {
    pub fn key(&self) -> (&str, &str, &str) {
        (&self.segment_id, &self.annotator_id, &self.system_id)
    }

    pub fn matches(&self, system_id: &str, direction: &str) -> bool {
        self.system_id == system_id && self.direction == direction
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

/// Identifiers may be written as JSON strings or integers.
#[derive(Deserialize)]
#[serde(untagged)]
enum RawId {
    Text(String),
    Number(u64),
}

impl From<RawId> for String {
    fn from(id: RawId) -> String {
        match id {
            RawId::Text(s) => s,
            RawId::Number(n) => n.to_string(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawError {
    category: String,
    #[serde(default)]
    severity: Option<String>,
    #[serde(default)]
    span: Option<[usize; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    segment_id: RawId,
    annotator_id: RawId,
    system_id: String,
    direction: String,
    sqm: serde_json::Number,
    errors: Vec<RawError>,
}

fn validate(raw: RawRecord, line: usize) -> Result<AnnotationRecord> {
    let schema = |message: String| HumanEvalError::Schema { line, message };
    let sqm = raw
        .sqm
        .as_i64()
        .ok_or_else(|| schema(format!("sqm `{}` is not an integer", raw.sqm)))?;
    let sqm = SqmRating::new(sqm).ok_or(HumanEvalError::SqmOutOfRange { line, value: sqm })?;
    let errors = raw
        .errors
        .into_iter()
        .map(|e| {
            let category: MqmCategory =
                e.category
                    .parse()
                    .map_err(|_| HumanEvalError::UnknownCategory {
                        line,
                        category: e.category.clone(),
                    })?;
            let severity = e
                .severity
                .as_deref()
                .map(str::parse::<Severity>)
                .transpose()
                .map_err(schema)?;
            let mut err = MqmError::new(category, severity).map_err(schema)?;
            if let Some([start, end]) = e.span {
                if start > end {
                    return Err(schema(format!("span [{start}, {end}] is reversed")));
                }
                err = err.with_span(start, end);
            }
            Ok(err)
        })
        .collect::<Result<Vec<_>>>()?;
    let record = AnnotationRecord {
        segment_id: raw.segment_id.into(),
        annotator_id: raw.annotator_id.into(),
        system_id: raw.system_id,
        direction: raw.direction,
        sqm,
        errors,
    };
    if record.segment_id.is_empty() || record.annotator_id.is_empty() || record.system_id.is_empty()
    {
        return Err(schema("identifiers must not be empty".into()));
    }
    Ok(record)
}

/// Parses a line-delimited JSON annotation bundle. Blank lines are skipped;
/// reported line numbers are 1-based.
pub fn parse_annotations<R: BufRead>(reader: R) -> Result<Vec<AnnotationRecord>> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| HumanEvalError::Schema {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(&line).map_err(|e| HumanEvalError::Schema {
            line: line_no,
            message: e.to_string(),
        })?;
        let record = validate(raw, line_no)?;
        let key = (
            record.segment_id.clone(),
            record.annotator_id.clone(),
            record.system_id.clone(),
        );
        if !seen.insert(key) {
            return Err(HumanEvalError::DuplicateKey {
                line: line_no,
                segment_id: record.segment_id,
                annotator_id: record.annotator_id,
                system_id: record.system_id,
            });
        }
        records.push(record);
    }
    Ok(records)
}

pub fn load_annotations(path: &Path) -> Result<Vec<AnnotationRecord>> {
    let file = fs::File::open(path).map_err(|source| HumanEvalError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_annotations(BufReader::new(file))
}
