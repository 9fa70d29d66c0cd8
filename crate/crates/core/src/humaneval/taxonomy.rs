use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Weight of a minor error.
pub const MINOR_WEIGHT: u32 = 1;
/// Weight of a major error.
pub const MAJOR_WEIGHT: u32 = 10;
/// Fixed weight of a non-translation, which carries no severity.
pub const NON_TRANSLATION_WEIGHT: u32 = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Minor,
    Major,
}

impl Severity {
    pub fn weight(self) -> u32 {
        match self {
            Severity::Minor => MINOR_WEIGHT,
            Severity::Major => MAJOR_WEIGHT,
        }
    }
}

impl FromStr for Severity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "minor" => Ok(Severity::Minor),
            "major" => Ok(Severity::Major),
            other => Err(format!("unknown severity `{other}`")),
        }
    }
}

/// Top level of the core MQM tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dimension {
    NonTranslation,
    Accuracy,
    Fluency,
}

impl Dimension {
    pub fn name(self) -> &'static str {
        match self {
            Dimension::NonTranslation => "Non-translation",
            Dimension::Accuracy => "Accuracy",
            Dimension::Fluency => "Fluency",
        }
    }
}

/// The eleven leaf categories of the core MQM tagset, in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MqmCategory {
    NonTranslation,
    Addition,
    Omission,
    Mistranslation,
    UntranslatedText,
    Punctuation,
    Spelling,
    Grammar,
    Register,
    Inconsistency,
    CharacterEncoding,
}

impl MqmCategory {
    pub const ALL: [MqmCategory; 11] = [
        MqmCategory::NonTranslation,
        MqmCategory::Addition,
        MqmCategory::Omission,
        MqmCategory::Mistranslation,
        MqmCategory::UntranslatedText,
        MqmCategory::Punctuation,
        MqmCategory::Spelling,
        MqmCategory::Grammar,
        MqmCategory::Register,
        MqmCategory::Inconsistency,
        MqmCategory::CharacterEncoding,
    ];

    /// Exact, case-sensitive name used in annotation files.
    pub fn name(self) -> &'static str {
        match self {
            MqmCategory::NonTranslation => "Non-translation",
            MqmCategory::Addition => "Addition",
            MqmCategory::Omission => "Omission",
            MqmCategory::Mistranslation => "Mistranslation",
            MqmCategory::UntranslatedText => "Untranslated text",
            MqmCategory::Punctuation => "Punctuation",
            MqmCategory::Spelling => "Spelling",
            MqmCategory::Grammar => "Grammar",
            MqmCategory::Register => "Register",
            MqmCategory::Inconsistency => "Inconsistency",
            MqmCategory::CharacterEncoding => "Character encoding",
        }
    }

    pub fn dimension(self) -> Dimension {
        use MqmCategory::*;
        match self {
            NonTranslation => Dimension::NonTranslation,
            Addition | Omission | Mistranslation | UntranslatedText => Dimension::Accuracy,
            Punctuation | Spelling | Grammar | Register | Inconsistency | CharacterEncoding => {
                Dimension::Fluency
            }
        }
    }

    pub fn description(self) -> &'static str {
        use MqmCategory::*;
        match self {
            NonTranslation => "Too badly translated to characterise individual errors.",
            Addition => "Translation includes information not present in the source.",
            Omission => "Translation is missing content from the source.",
            Mistranslation => "Translation does not accurately represent the source.",
            UntranslatedText => "Source text has been left untranslated.",
            Punctuation => "Incorrect punctuation.",
            Spelling => "Incorrect spelling or capitalisation.",
            Grammar => "Problems with grammar, other than orthography.",
            Register => "Wrong grammatical register.",
            Inconsistency => "Internal inconsistency (not related to terminology).",
            CharacterEncoding => "Characters are garbled due to incorrect encoding.",
        }
    }

    /// Whether errors of this category carry a minor/major severity.
    pub fn takes_severity(self) -> bool {
        self != MqmCategory::NonTranslation
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for MqmCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MqmCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MqmCategory::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("`{s}` is not a core MQM category"))
    }
}

impl Serialize for MqmCategory {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for MqmCategory {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eleven_leaves_round_trip_by_name() {
        assert_eq!(MqmCategory::ALL.len(), 11);
        for (i, c) in MqmCategory::ALL.into_iter().enumerate() {
            assert_eq!(c.index(), i);
            assert_eq!(c.name().parse::<MqmCategory>().unwrap(), c);
        }
    }

    #[test]
    fn names_are_case_sensitive_and_core_only() {
        assert!("untranslated text".parse::<MqmCategory>().is_err());
        assert!("Terminology".parse::<MqmCategory>().is_err());
        assert!("Accuracy".parse::<MqmCategory>().is_err());
    }

    #[test]
    fn tree_shape() {
        let count = |d| {
            MqmCategory::ALL
                .iter()
                .filter(|c| c.dimension() == d)
                .count()
        };
        assert_eq!(count(Dimension::NonTranslation), 1);
        assert_eq!(count(Dimension::Accuracy), 4);
        assert_eq!(count(Dimension::Fluency), 6);
        assert!(!MqmCategory::NonTranslation.takes_severity());
        assert!(MqmCategory::Grammar.takes_severity());
    }

    #[test]
    fn weights() {
        assert_eq!(Severity::Minor.weight(), 1);
        assert_eq!(Severity::Major.weight(), 10);
        assert_eq!(NON_TRANSLATION_WEIGHT, 25);
    }
}
