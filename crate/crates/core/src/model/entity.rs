use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::corpus::Sentence;
use super::ids::SentenceId;

/// The six flat entity types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EntityType {
    #[serde(rename = "PERS")]
    Pers,
    #[serde(rename = "ORG")]
    Org,
    #[serde(rename = "GPE")]
    Gpe,
    #[serde(rename = "LOC")]
    Loc,
    #[serde(rename = "FAC")]
    Fac,
    #[serde(rename = "CURR")]
    Curr,
}

impl EntityType {
    pub const ALL: [EntityType; 6] = [
        EntityType::Pers,
        EntityType::Org,
        EntityType::Gpe,
        EntityType::Loc,
        EntityType::Fac,
        EntityType::Curr,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            EntityType::Pers => "PERS",
            EntityType::Org => "ORG",
            EntityType::Gpe => "GPE",
            EntityType::Loc => "LOC",
            EntityType::Fac => "FAC",
            EntityType::Curr => "CURR",
        }
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for EntityType {
    type Err = Iob2Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EntityType::ALL
            .iter()
            .copied()
            .find(|t| t.tag() == s)
            .ok_or_else(|| Iob2Error::UnknownEntityType(s.to_owned()))
    }
}

/// A flat entity span over an inclusive token range of one sentence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EntityMention {
    pub sentence_id: SentenceId,
    pub start_position: usize,
    pub end_position: usize,
    pub entity_type: EntityType,
}

impl EntityMention {
    pub fn len(&self) -> usize {
        self.end_position + 1 - self.start_position
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, position: usize) -> bool {
        (self.start_position..=self.end_position).contains(&position)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Iob2Error {
    #[error("mentions overlap at token {position}")]
    OverlappingMentions { position: usize },
    #[error("span {start}..={end} out of range for sentence of {len} tokens")]
    SpanOutOfRange {
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("mention belongs to sentence {found}, expected {expected}")]
    ForeignMention {
        expected: SentenceId,
        found: SentenceId,
    },
    #[error("malformed IOB2 tag {tag:?} at position {position}")]
    MalformedIob2 { position: usize, tag: String },
    #[error("unknown entity type {0:?}")]
    UnknownEntityType(String),
}

/// Encodes mentions as one IOB2 tag per token.
pub fn to_iob2(sentence: &Sentence, mentions: &[EntityMention]) -> Result<Vec<String>, Iob2Error> {
    let len = sentence.len();
    let mut slots: Vec<Option<(EntityType, bool)>> = vec![None; len];
    for m in mentions {
        if m.sentence_id != sentence.sentence_id {
            return Err(Iob2Error::ForeignMention {
                expected: sentence.sentence_id.clone(),
                found: m.sentence_id.clone(),
            });
        }
        if m.start_position > m.end_position || m.end_position >= len {
            return Err(Iob2Error::SpanOutOfRange {
                start: m.start_position,
                end: m.end_position,
                len,
            });
        }
        for (p, slot) in slots
            .iter_mut()
            .enumerate()
            .take(m.end_position + 1)
            .skip(m.start_position)
        {
            if slot.is_some() {
                return Err(Iob2Error::OverlappingMentions { position: p });
            }
            *slot = Some((m.entity_type, p == m.start_position));
        }
    }
    Ok(slots
        .into_iter()
        .map(|slot| match slot {
            None => "O".to_owned(),
            Some((t, true)) => format!("B-{t}"),
            Some((t, false)) => format!("I-{t}"),
        })
        .collect())
}

/// Decodes IOB2 tags into mentions ordered by start position.
///
/// An `I-` tag must continue a span of the same type.
pub fn from_iob2<S: AsRef<str>>(
    sentence_id: &SentenceId,
    tags: &[S],
) -> Result<Vec<EntityMention>, Iob2Error> {
    let mut mentions: Vec<EntityMention> = Vec::new();
    let mut open: Option<usize> = None;
    for (position, tag) in tags.iter().enumerate() {
        let tag = tag.as_ref();
        if tag == "O" {
            open = None;
            continue;
        }
        let malformed = || Iob2Error::MalformedIob2 {
            position,
            tag: tag.to_owned(),
        };
        let (prefix, ty) = tag.split_once('-').ok_or_else(malformed)?;
        let entity_type: EntityType = ty.parse()?;
        match prefix {
            "B" => {
                mentions.push(EntityMention {
                    sentence_id: sentence_id.clone(),
                    start_position: position,
                    end_position: position,
                    entity_type,
                });
                open = Some(mentions.len() - 1);
            }
            "I" => match open {
                Some(i) if mentions[i].entity_type == entity_type => {
                    mentions[i].end_position = position;
                }
                _ => return Err(malformed()),
            },
            _ => return Err(malformed()),
        }
    }
    Ok(mentions)
}
