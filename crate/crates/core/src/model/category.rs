use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// The six ordered relatedness categories an annotator assigns to a sense.
///
/// Variants are declared from lowest to highest so the derived `Ord`
/// matches the numeric order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScoreCategory {
    Different,
    RootSemantics,
    Related,
    Referral,
    General,
    Explicate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("invalid score value {0}: expected one of 1, 20, 40, 60, 80, 100")]
pub struct InvalidScoreValue(pub i64);

impl ScoreCategory {
    pub const ALL: [ScoreCategory; 6] = [
        ScoreCategory::Different,
        ScoreCategory::RootSemantics,
        ScoreCategory::Related,
        ScoreCategory::Referral,
        ScoreCategory::General,
        ScoreCategory::Explicate,
    ];

    /// Number of categories.
    pub const COUNT: usize = 6;

    /// Lowest value that counts as a correct sense.
    pub const CORRECT_THRESHOLD: u8 = 60;

    /// The stored percent value.
    pub const fn value(self) -> u8 {
        match self {
            ScoreCategory::Explicate => 100,
            ScoreCategory::General => 80,
            ScoreCategory::Referral => 60,
            ScoreCategory::Related => 40,
            ScoreCategory::RootSemantics => 20,
            ScoreCategory::Different => 1,
        }
    }

    /// Ordinal rank, 0 for `Different` up to 5 for `Explicate`.
    pub const fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn from_value(value: i64) -> Result<Self, InvalidScoreValue> {
        Self::ALL
            .iter()
            .copied()
            .find(|c| i64::from(c.value()) == value)
            .ok_or(InvalidScoreValue(value))
    }

    pub const fn is_correct(self) -> bool {
        self.value() >= Self::CORRECT_THRESHOLD
    }

    /// Explicate or General: the categories validation treats as "the" sense.
    pub const fn is_primary(self) -> bool {
        matches!(self, ScoreCategory::Explicate | ScoreCategory::General)
    }

    pub const fn name(self) -> &'static str {
        match self {
            ScoreCategory::Explicate => "Explicate",
            ScoreCategory::General => "General",
            ScoreCategory::Referral => "Referral",
            ScoreCategory::Related => "Related",
            ScoreCategory::RootSemantics => "RootSemantics",
            ScoreCategory::Different => "Different",
        }
    }
}

/// Looks up the category carrying exactly the given percent value.
pub fn category_from_value(value: i64) -> Result<ScoreCategory, InvalidScoreValue> {
    ScoreCategory::from_value(value)
}

impl fmt::Display for ScoreCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScoreCategory {
    type Err = InvalidScoreValue;

    /// Accepts either a category name (case-insensitive) or its numeric value.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(c) = Self::ALL.iter().find(|c| c.name().eq_ignore_ascii_case(s)) {
            return Ok(*c);
        }
        if s.eq_ignore_ascii_case("root") || s.eq_ignore_ascii_case("root_semantics") {
            return Ok(ScoreCategory::RootSemantics);
        }
        s.parse::<i64>()
            .map_err(|_| InvalidScoreValue(-1))
            .and_then(Self::from_value)
    }
}

// Stored as the numeric percent, like the annotation tool does.
impl Serialize for ScoreCategory {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.value())
    }
}

impl<'de> Deserialize<'de> for ScoreCategory {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = i64::deserialize(deserializer)?;
        ScoreCategory::from_value(v).map_err(serde::de::Error::custom)
    }
}
