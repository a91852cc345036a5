//! Corpus, lexicon and annotation data model shared by every other module.
//!
//! All values are plain immutable data after construction. Sentences arrive
//! pre-tokenized; the model never segments or tokenizes text itself.

mod category;
mod corpus;
mod entity;
mod ids;
mod lexicon;

pub use category::{category_from_value, InvalidScoreValue, ScoreCategory};
pub use corpus::{Corpus, Sentence, Token, TokenClass, TokenRef};
pub use entity::{from_iob2, to_iob2, EntityMention, EntityType, Iob2Error};
pub use ids::{AnnotatorId, InventoryId, LemmaId, SenseId, SentenceId};
pub use lexicon::{
    Lemma, LexiconError, Sense, SenseInventory, DIGIT_SENSE, PUNCT_SENSE, SYSTEM_INVENTORY,
};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

/// One scored (token occurrence, sense) judgement by one annotator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoredSenseAnnotation {
    pub sentence_id: SentenceId,
    pub token_position: usize,
    pub sense_id: SenseId,
    pub inventory_id: InventoryId,
    pub category: ScoreCategory,
    pub annotator_id: AnnotatorId,
    pub timestamp: DateTime<Utc>,
}

impl ScoredSenseAnnotation {
    /// The uniqueness key: (sentence, position, sense, annotator).
    ///
    /// Sense ids are only unique per inventory, so the inventory is part of
    /// the key as well.
    pub fn key(&self) -> AnnotationKey {
        AnnotationKey {
            sentence_id: self.sentence_id.clone(),
            token_position: self.token_position,
            inventory_id: self.inventory_id.clone(),
            sense_id: self.sense_id.clone(),
            annotator_id: self.annotator_id.clone(),
        }
    }

    pub fn token(&self) -> TokenRef {
        TokenRef::new(self.sentence_id.clone(), self.token_position)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AnnotationKey {
    pub sentence_id: SentenceId,
    pub token_position: usize,
    pub inventory_id: InventoryId,
    pub sense_id: SenseId,
    pub annotator_id: AnnotatorId,
}
