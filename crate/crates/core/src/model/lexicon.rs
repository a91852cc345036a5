use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::ids::{InventoryId, LemmaId, SenseId};

/// Id of the built-in inventory holding the digit and punctuation senses.
pub const SYSTEM_INVENTORY: &str = "system";
/// Shared sense of every digit token.
pub const DIGIT_SENSE: &str = "digit";
/// Shared sense of every punctuation token.
pub const PUNCT_SENSE: &str = "Punc";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma {
    pub lemma_id: LemmaId,
    pub citation_form: String,
    pub pos: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sense {
    pub sense_id: SenseId,
    pub lemma_id: LemmaId,
    pub gloss: String,
    pub inventory_id: InventoryId,
    pub rank_in_lemma: usize,
    pub is_proper_noun: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LexiconError {
    #[error("inventory {inventory}: duplicate lemma id {lemma}")]
    DuplicateLemma {
        inventory: InventoryId,
        lemma: LemmaId,
    },
    #[error("inventory {inventory}: duplicate sense id {sense}")]
    DuplicateSense {
        inventory: InventoryId,
        sense: SenseId,
    },
    #[error("inventory {inventory}: sense {sense} references unknown lemma {lemma}")]
    UnknownLemma {
        inventory: InventoryId,
        sense: SenseId,
        lemma: LemmaId,
    },
    #[error("inventory {inventory}: lemma {lemma} has two senses with rank {rank}")]
    DuplicateRank {
        inventory: InventoryId,
        lemma: LemmaId,
        rank: usize,
    },
    #[error("inventory {inventory}: sense {sense} belongs to inventory {actual}")]
    ForeignSense {
        inventory: InventoryId,
        sense: SenseId,
        actual: InventoryId,
    },
    #[error("inventory {inventory}: empty citation form for lemma {lemma}")]
    EmptyCitationForm {
        inventory: InventoryId,
        lemma: LemmaId,
    },
}

/// A lexicon: lemmas with their ordered sense lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SenseInventory {
    inventory_id: InventoryId,
    lemmas: Vec<Lemma>,
    senses: Vec<Sense>,
    lemma_index: HashMap<LemmaId, usize>,
    sense_index: HashMap<SenseId, usize>,
    // lemma -> sense indices sorted by rank
    by_lemma: HashMap<LemmaId, Vec<usize>>,
}

impl SenseInventory {
    pub fn new(
        inventory_id: InventoryId,
        lemmas: Vec<Lemma>,
        senses: Vec<Sense>,
    ) -> Result<Self, LexiconError> {
        let mut lemma_index = HashMap::with_capacity(lemmas.len());
        for (i, l) in lemmas.iter().enumerate() {
            if l.citation_form.is_empty() {
                return Err(LexiconError::EmptyCitationForm {
                    inventory: inventory_id,
                    lemma: l.lemma_id.clone(),
                });
            }
            if lemma_index.insert(l.lemma_id.clone(), i).is_some() {
                return Err(LexiconError::DuplicateLemma {
                    inventory: inventory_id,
                    lemma: l.lemma_id.clone(),
                });
            }
        }

        let mut sense_index = HashMap::with_capacity(senses.len());
        let mut ranks: BTreeMap<(&LemmaId, usize), ()> = BTreeMap::new();
        for (i, s) in senses.iter().enumerate() {
            if s.inventory_id != inventory_id {
                return Err(LexiconError::ForeignSense {
                    inventory: inventory_id,
                    sense: s.sense_id.clone(),
                    actual: s.inventory_id.clone(),
                });
            }
            if !lemma_index.contains_key(&s.lemma_id) {
                return Err(LexiconError::UnknownLemma {
                    inventory: inventory_id,
                    sense: s.sense_id.clone(),
                    lemma: s.lemma_id.clone(),
                });
            }
            if sense_index.insert(s.sense_id.clone(), i).is_some() {
                return Err(LexiconError::DuplicateSense {
                    inventory: inventory_id,
                    sense: s.sense_id.clone(),
                });
            }
            if ranks.insert((&s.lemma_id, s.rank_in_lemma), ()).is_some() {
                return Err(LexiconError::DuplicateRank {
                    inventory: inventory_id.clone(),
                    lemma: s.lemma_id.clone(),
                    rank: s.rank_in_lemma,
                });
            }
        }

        let mut by_lemma: HashMap<LemmaId, Vec<usize>> = HashMap::new();
        for (i, s) in senses.iter().enumerate() {
            by_lemma.entry(s.lemma_id.clone()).or_default().push(i);
        }
        for list in by_lemma.values_mut() {
            list.sort_by_key(|&i| senses[i].rank_in_lemma);
        }

        Ok(Self {
            inventory_id,
            lemmas,
            senses,
            lemma_index,
            sense_index,
            by_lemma,
        })
    }

    /// The built-in inventory with the `digit` and `Punc` sentinel senses.
    pub fn system() -> Self {
        let inv = InventoryId::new(SYSTEM_INVENTORY);
        let lemmas = [DIGIT_SENSE, PUNCT_SENSE]
            .iter()
            .map(|id| Lemma {
                lemma_id: LemmaId::new(*id),
                citation_form: (*id).to_owned(),
                pos: "sentinel".to_owned(),
            })
            .collect();
        let senses = [DIGIT_SENSE, PUNCT_SENSE]
            .iter()
            .map(|id| Sense {
                sense_id: SenseId::new(*id),
                lemma_id: LemmaId::new(*id),
                gloss: (*id).to_owned(),
                inventory_id: inv.clone(),
                rank_in_lemma: 0,
                is_proper_noun: false,
            })
            .collect();
        Self::new(inv, lemmas, senses).expect("system inventory is well formed")
    }

    pub fn id(&self) -> &InventoryId {
        &self.inventory_id
    }

    pub fn lemmas(&self) -> &[Lemma] {
        &self.lemmas
    }

    pub fn senses(&self) -> &[Sense] {
        &self.senses
    }

    pub fn lemma(&self, id: &LemmaId) -> Option<&Lemma> {
        self.lemma_index.get(id).map(|&i| &self.lemmas[i])
    }

    pub fn contains_lemma(&self, id: &LemmaId) -> bool {
        self.lemma_index.contains_key(id)
    }

    pub fn sense(&self, id: &SenseId) -> Option<&Sense> {
        self.sense_index.get(id).map(|&i| &self.senses[i])
    }

    /// Senses of a lemma in `rank_in_lemma` order; empty if the lemma is absent.
    pub fn senses_of(&self, lemma: &LemmaId) -> Vec<&Sense> {
        self.by_lemma
            .get(lemma)
            .map(|idx| idx.iter().map(|&i| &self.senses[i]).collect())
            .unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sense(id: &str, lemma: &str, rank: usize) -> Sense {
        Sense {
            sense_id: id.into(),
            lemma_id: lemma.into(),
            gloss: format!("gloss of {id}"),
            inventory_id: "modern".into(),
            rank_in_lemma: rank,
            is_proper_noun: false,
        }
    }

    fn lemma(id: &str) -> Lemma {
        Lemma {
            lemma_id: id.into(),
            citation_form: id.into(),
            pos: "noun".into(),
        }
    }

    #[test]
    fn senses_of_is_rank_ordered() {
        let inv = SenseInventory::new(
            "modern".into(),
            vec![lemma("l1")],
            vec![sense("b", "l1", 1), sense("a", "l1", 0)],
        )
        .unwrap();
        let ids: Vec<_> = inv
            .senses_of(&"l1".into())
            .iter()
            .map(|s| s.sense_id.as_str())
            .collect();
        assert_eq!(ids, vec!["a", "b"]);
        assert!(inv.senses_of(&"missing".into()).is_empty());
    }

    #[test]
    fn rejects_dangling_lemma_and_duplicate_rank() {
        let err = SenseInventory::new("modern".into(), vec![], vec![sense("a", "l1", 0)]);
        assert!(matches!(err, Err(LexiconError::UnknownLemma { .. })));
        let err = SenseInventory::new(
            "modern".into(),
            vec![lemma("l1")],
            vec![sense("a", "l1", 0), sense("b", "l1", 0)],
        );
        assert!(matches!(err, Err(LexiconError::DuplicateRank { .. })));
    }

    #[test]
    fn system_inventory_has_two_sentinels() {
        let sys = SenseInventory::system();
        assert_eq!(sys.senses().len(), 2);
        assert!(sys.sense(&DIGIT_SENSE.into()).is_some());
        assert!(sys.sense(&PUNCT_SENSE.into()).is_some());
    }
}
