use std::collections::{BTreeMap, HashMap};

use crate::model::{
    AnnotatorId, InventoryId, ScoreCategory, ScoredSenseAnnotation, SenseId, TokenRef,
};

/// Reference sense scores per (token occurrence, inventory).
///
/// When several annotators scored the same occurrence in the same inventory
/// (double annotation), the annotator with the smallest id is used.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GoldStandard {
    scores: HashMap<(TokenRef, InventoryId), BTreeMap<SenseId, ScoreCategory>>,
}

impl GoldStandard {
    pub fn from_annotations(annotations: &[ScoredSenseAnnotation]) -> Self {
        let mut chosen: HashMap<(TokenRef, InventoryId), &AnnotatorId> = HashMap::new();
        for a in annotations {
            let key = (a.token(), a.inventory_id.clone());
            chosen
                .entry(key)
                .and_modify(|who| {
                    if a.annotator_id < **who {
                        *who = &a.annotator_id;
                    }
                })
                .or_insert(&a.annotator_id);
        }
        let mut scores: HashMap<(TokenRef, InventoryId), BTreeMap<SenseId, ScoreCategory>> =
            HashMap::new();
        for a in annotations {
            let key = (a.token(), a.inventory_id.clone());
            if chosen.get(&key) == Some(&&a.annotator_id) {
                scores
                    .entry(key)
                    .or_default()
                    .insert(a.sense_id.clone(), a.category);
            }
        }
        Self { scores }
    }

    /// Sense scores of one occurrence; `None` if it was never annotated there.
    pub fn senses(
        &self,
        token: &TokenRef,
        inventory: &InventoryId,
    ) -> Option<&BTreeMap<SenseId, ScoreCategory>> {
        self.scores.get(&(token.clone(), inventory.clone()))
    }

    pub fn category(
        &self,
        token: &TokenRef,
        inventory: &InventoryId,
        sense: &SenseId,
    ) -> Option<ScoreCategory> {
        self.senses(token, inventory)?.get(sense).copied()
    }

    /// Whether `sense` meets `threshold` for this occurrence.
    pub fn is_correct(
        &self,
        token: &TokenRef,
        inventory: &InventoryId,
        sense: &SenseId,
        threshold: ScoreCategory,
    ) -> bool {
        self.category(token, inventory, sense)
            .is_some_and(|c| c >= threshold)
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}
