//! Automatic annotation checks and corpus/lexicon reports.

mod report;

pub use report::{
    corpus_statistics, coverage_report, ClassStats, CorpusStatistics, CoverageReport, EntityStats,
    Ratio,
};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{
    AnnotatorId, Corpus, InventoryId, LemmaId, ScoreCategory, ScoredSenseAnnotation, Sense,
    SenseId, SenseInventory, SentenceId, Token, TokenRef, DIGIT_SENSE, PUNCT_SENSE,
    SYSTEM_INVENTORY,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ValidationRule {
    /// Two or more Explicate/General senses in one inventory.
    MultipleCorrectSenses,
    /// No Explicate/General sense for a noun or verb whose lemma is listed.
    MissingCorrectSense,
    /// A proper-noun sense is chosen but a sibling sense is not Different.
    ProperNounConflict,
}

impl fmt::Display for ValidationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ValidationRule::MultipleCorrectSenses => "MultipleCorrectSenses",
            ValidationRule::MissingCorrectSense => "MissingCorrectSense",
            ValidationRule::ProperNounConflict => "ProperNounConflict",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ValidationFlag {
    pub sentence_id: SentenceId,
    pub token_position: usize,
    pub inventory_id: InventoryId,
    pub annotator_id: AnnotatorId,
    pub rule: ValidationRule,
    pub details: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidationError {
    #[error("annotation at {token} references {what}")]
    DanglingReference { token: TokenRef, what: String },
    #[error("annotation at {token}: {message}")]
    SentinelMismatch { token: TokenRef, message: String },
    #[error("conflicting duplicate annotations for sense {sense} at {token} by {annotator}")]
    ConflictingDuplicate {
        token: TokenRef,
        sense: SenseId,
        annotator: AnnotatorId,
    },
}

/// Inventories addressable by id, always including the system inventory.
pub(crate) struct InventorySet<'a> {
    map: HashMap<&'a InventoryId, &'a SenseInventory>,
    system: SenseInventory,
}

impl<'a> InventorySet<'a> {
    pub(crate) fn new(inventories: &[&'a SenseInventory]) -> Self {
        Self {
            map: inventories.iter().map(|inv| (inv.id(), *inv)).collect(),
            system: SenseInventory::system(),
        }
    }

    pub(crate) fn get(&self, id: &InventoryId) -> Option<&SenseInventory> {
        if id.as_str() == SYSTEM_INVENTORY {
            return Some(&self.system);
        }
        self.map.get(id).copied()
    }
}

type Group<'a> = BTreeMap<&'a SenseId, (ScoreCategory, &'a Sense)>;

/// Checks annotations against the three validation rules.
///
/// Every (token, inventory, annotator) triple is considered for each
/// annotator who scored the token in at least one inventory, so a token left
/// unscored in one inventory can still be flagged there. Output is sorted.
pub fn validate(
    corpus: &Corpus,
    annotations: &[ScoredSenseAnnotation],
    inventories: &[&SenseInventory],
) -> Result<Vec<ValidationFlag>, ValidationError> {
    let set = InventorySet::new(inventories);

    // token -> inventory -> annotator -> sense -> category
    let mut grouped: BTreeMap<TokenRef, BTreeMap<&InventoryId, BTreeMap<&AnnotatorId, Group>>> =
        BTreeMap::new();
    let mut annotators: BTreeMap<TokenRef, BTreeSet<&AnnotatorId>> = BTreeMap::new();

    for a in annotations {
        let token_ref = a.token();
        let token = corpus
            .token(&token_ref)
            .ok_or_else(|| ValidationError::DanglingReference {
                token: token_ref.clone(),
                what: "a token that does not exist".into(),
            })?;
        let inventory =
            set.get(&a.inventory_id)
                .ok_or_else(|| ValidationError::DanglingReference {
                    token: token_ref.clone(),
                    what: format!("unknown inventory {}", a.inventory_id),
                })?;
        let sense =
            inventory
                .sense(&a.sense_id)
                .ok_or_else(|| ValidationError::DanglingReference {
                    token: token_ref.clone(),
                    what: format!("unknown sense {} in {}", a.sense_id, a.inventory_id),
                })?;
        check_sentinel(token, &token_ref, a)?;

        let group = grouped
            .entry(token_ref.clone())
            .or_default()
            .entry(&a.inventory_id)
            .or_default()
            .entry(&a.annotator_id)
            .or_default();
        if let Some((prev, _)) = group.insert(&a.sense_id, (a.category, sense)) {
            if prev != a.category {
                return Err(ValidationError::ConflictingDuplicate {
                    token: token_ref,
                    sense: a.sense_id.clone(),
                    annotator: a.annotator_id.clone(),
                });
            }
        }
        if a.inventory_id.as_str() != SYSTEM_INVENTORY {
            annotators
                .entry(token_ref)
                .or_default()
                .insert(&a.annotator_id);
        }
    }

    let empty = Group::new();
    let mut flags = Vec::new();
    for (token_ref, who) in &annotators {
        let token = corpus.token(token_ref).expect("checked above");
        for inventory in inventories {
            for annotator in who {
                let group = grouped
                    .get(token_ref)
                    .and_then(|by_inv| by_inv.get(inventory.id()))
                    .and_then(|by_ann| by_ann.get(annotator))
                    .unwrap_or(&empty);
                check_group(token, token_ref, inventory, annotator, group, &mut flags);
            }
        }
    }
    flags.sort();
    Ok(flags)
}

fn check_sentinel(
    token: &Token,
    token_ref: &TokenRef,
    a: &ScoredSenseAnnotation,
) -> Result<(), ValidationError> {
    use crate::model::TokenClass;
    let is_system = a.inventory_id.as_str() == SYSTEM_INVENTORY;
    let expected = match token.token_class {
        TokenClass::Digit => Some(DIGIT_SENSE),
        TokenClass::Punctuation => Some(PUNCT_SENSE),
        _ => None,
    };
    match expected {
        Some(name) if !is_system || a.sense_id.as_str() != name => {
            Err(ValidationError::SentinelMismatch {
                token: token_ref.clone(),
                message: format!(
                    "{} token may only carry the {name:?} sense, found {}/{}",
                    token.token_class, a.inventory_id, a.sense_id
                ),
            })
        }
        None if is_system => Err(ValidationError::SentinelMismatch {
            token: token_ref.clone(),
            message: format!(
                "{} token carries sentinel sense {}",
                token.token_class, a.sense_id
            ),
        }),
        _ => Ok(()),
    }
}

fn check_group(
    token: &Token,
    token_ref: &TokenRef,
    inventory: &SenseInventory,
    annotator: &AnnotatorId,
    group: &Group,
    flags: &mut Vec<ValidationFlag>,
) {
    let flag = |rule, details: String| ValidationFlag {
        sentence_id: token_ref.sentence_id.clone(),
        token_position: token_ref.token_position,
        inventory_id: inventory.id().clone(),
        annotator_id: annotator.clone(),
        rule,
        details,
    };

    let primary: Vec<&SenseId> = group
        .iter()
        .filter(|(_, (c, _))| c.is_primary())
        .map(|(id, _)| *id)
        .collect();

    if primary.len() >= 2 {
        flags.push(flag(
            ValidationRule::MultipleCorrectSenses,
            format!("senses {} are all Explicate or General", join(&primary)),
        ));
    }

    if primary.is_empty() && token.token_class.is_content() {
        let lemma = resolved_lemma(token, group);
        if let Some(lemma) = lemma.filter(|l| inventory.contains_lemma(l)) {
            flags.push(flag(
                ValidationRule::MissingCorrectSense,
                format!("no Explicate or General sense among senses of lemma {lemma}"),
            ));
        }
    }

    for (id, (category, sense)) in group {
        if !(sense.is_proper_noun && category.is_primary()) {
            continue;
        }
        let offending: Vec<&SenseId> = group
            .iter()
            .filter(|(other, (c, s))| {
                *other != id && s.lemma_id == sense.lemma_id && *c != ScoreCategory::Different
            })
            .map(|(other, _)| *other)
            .collect();
        if !offending.is_empty() {
            flags.push(flag(
                ValidationRule::ProperNounConflict,
                format!(
                    "proper-noun sense {id} is {category} but {} not Different",
                    join(&offending)
                ),
            ));
            break;
        }
    }
}

fn resolved_lemma<'a>(token: &'a Token, group: &'a Group) -> Option<&'a LemmaId> {
    token
        .gold_lemma_id
        .as_ref()
        .or_else(|| group.values().next().map(|(_, s)| &s.lemma_id))
}

fn join(ids: &[&SenseId]) -> String {
    ids.iter()
        .map(|s| s.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}
