//! Corpus-level WSD evaluation: Top-k accuracy per window size and inventory.

mod sweep;

pub use sweep::{sweep, SweepCell, SweepReport};

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{
    Corpus, EntityMention, InventoryId, ScoreCategory, SenseInventory, Sentence, SentenceId,
    TokenClass, TokenRef,
};
use crate::wsd::{
    build_pairs, extract_window, lookup_candidate_glosses, rank_glosses, score_pairs, GoldStandard,
    LemmaMode, Lemmatizer, Markup, TsvScorer, WindowSize, WsdError,
};

/// Ranks reported: Top-1, Top-2, Top-3.
pub const TOP_K: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationConfig {
    pub inventory_id: InventoryId,
    pub window: WindowSize,
    #[serde(default)]
    pub markup: Markup,
    #[serde(default)]
    pub lemma_mode: LemmaMode,
    /// A ranked sense is correct when its gold category is at least this.
    #[serde(default = "default_threshold")]
    pub correctness_threshold: ScoreCategory,
    /// Score function words too. They never enter the headline accuracy.
    #[serde(default)]
    pub include_function_words: bool,
    /// Skip tokens without gold instead of failing. Useful on a store that
    /// is still being annotated.
    #[serde(default)]
    pub skip_unannotated: bool,
}

fn default_threshold() -> ScoreCategory {
    ScoreCategory::Referral
}

impl EvaluationConfig {
    pub fn new(inventory_id: InventoryId, window: WindowSize) -> Self {
        Self {
            inventory_id,
            window,
            markup: Markup::None,
            lemma_mode: LemmaMode::Gold,
            correctness_threshold: default_threshold(),
            include_function_words: false,
            skip_unannotated: false,
        }
    }
}

/// Everything an evaluation reads besides the inventory and scorer.
#[derive(Clone, Copy)]
pub struct EvaluationInputs<'a> {
    pub corpus: &'a Corpus,
    pub gold: &'a GoldStandard,
    pub mentions: &'a [EntityMention],
    pub lemmatizer: Option<&'a dyn Lemmatizer>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("no gold annotation for {token} in {inventory}")]
    IncompleteGold {
        token: TokenRef,
        inventory: InventoryId,
    },
    #[error("inventory {expected} requested but {found} supplied")]
    InventoryMismatch {
        expected: InventoryId,
        found: InventoryId,
    },
    #[error(transparent)]
    Wsd(#[from] WsdError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipCounts {
    pub no_candidates: usize,
    pub lemma_miss: usize,
    pub digits: usize,
    pub punctuation: usize,
    pub entity_tokens: usize,
    pub function_words_excluded: usize,
    #[serde(default)]
    pub unannotated: usize,
}

impl SkipCounts {
    pub fn total(&self) -> usize {
        self.no_candidates
            + self.lemma_miss
            + self.digits
            + self.punctuation
            + self.entity_tokens
            + self.unannotated
            + self.function_words_excluded
    }

    fn merge(&mut self, o: &SkipCounts) {
        self.no_candidates += o.no_candidates;
        self.lemma_miss += o.lemma_miss;
        self.digits += o.digits;
        self.punctuation += o.punctuation;
        self.entity_tokens += o.entity_tokens;
        self.function_words_excluded += o.function_words_excluded;
        self.unannotated += o.unannotated;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassTally {
    pub evaluated: usize,
    /// `correct_at[k]`: occurrences with a correct sense among the top k+1.
    pub correct_at: [usize; TOP_K],
}

impl ClassTally {
    pub fn accuracy(&self, k: usize) -> Option<f64> {
        (self.evaluated > 0).then(|| self.correct_at[k - 1] as f64 / self.evaluated as f64)
    }
}

/// Additive evaluation counts. Merging is associative and commutative.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub eligible: usize,
    pub by_class: BTreeMap<TokenClass, ClassTally>,
    pub skipped: SkipCounts,
}

impl Tally {
    pub fn merge(mut self, o: Tally) -> Tally {
        self.eligible += o.eligible;
        for (c, t) in o.by_class {
            let e = self.by_class.entry(c).or_default();
            e.evaluated += t.evaluated;
            for k in 0..TOP_K {
                e.correct_at[k] += t.correct_at[k];
            }
        }
        self.skipped.merge(&o.skipped);
        self
    }

    fn class(&self, c: TokenClass) -> ClassTally {
        self.by_class.get(&c).copied().unwrap_or_default()
    }

    /// Nouns and verbs together.
    pub fn headline(&self) -> ClassTally {
        let (n, v) = (self.class(TokenClass::Noun), self.class(TokenClass::Verb));
        let mut correct_at = [0; TOP_K];
        for (k, slot) in correct_at.iter_mut().enumerate() {
            *slot = n.correct_at[k] + v.correct_at[k];
        }
        ClassTally {
            evaluated: n.evaluated + v.evaluated,
            correct_at,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosAccuracy {
    pub evaluated: usize,
    pub top1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub scorer: String,
    pub config: EvaluationConfig,
    /// Headline Top-1/2/3 over nouns and verbs.
    pub top1: Option<f64>,
    pub top2: Option<f64>,
    pub top3: Option<f64>,
    pub noun: PosAccuracy,
    pub verb: PosAccuracy,
    pub function_word: PosAccuracy,
    /// Nouns and verbs scored.
    pub evaluated: usize,
    pub evaluated_function_words: usize,
    pub skipped: SkipCounts,
    /// All corpus tokens; equals evaluated + evaluated_function_words + skipped.
    pub eligible: usize,
}

impl EvaluationReport {
    fn from_tally(scorer: String, config: EvaluationConfig, tally: &Tally) -> Self {
        let head = tally.headline();
        let pos = |c| {
            let t = tally.class(c);
            PosAccuracy {
                evaluated: t.evaluated,
                top1: t.accuracy(1),
            }
        };
        Self {
            scorer,
            config,
            top1: head.accuracy(1),
            top2: head.accuracy(2),
            top3: head.accuracy(3),
            noun: pos(TokenClass::Noun),
            verb: pos(TokenClass::Verb),
            function_word: pos(TokenClass::FunctionWord),
            evaluated: head.evaluated,
            evaluated_function_words: tally.class(TokenClass::FunctionWord).evaluated,
            skipped: tally.skipped,
            eligible: tally.eligible,
        }
    }
}

/// Runs the pipeline over every token and scores the rankings against gold.
///
/// Digits, punctuation and tokens inside entity mentions are skipped, as are
/// tokens whose lemma cannot be resolved or has no senses in the inventory.
/// Sentences are processed in parallel; the result does not depend on
/// scheduling or sentence order.
pub fn evaluate(
    inputs: EvaluationInputs<'_>,
    inventory: &SenseInventory,
    scorer: &dyn TsvScorer,
    config: &EvaluationConfig,
) -> Result<EvaluationReport, EvalError> {
    if inventory.id() != &config.inventory_id {
        return Err(EvalError::InventoryMismatch {
            expected: config.inventory_id.clone(),
            found: inventory.id().clone(),
        });
    }
    let entity_tokens: HashSet<(&SentenceId, usize)> = inputs
        .mentions
        .iter()
        .flat_map(|m| (m.start_position..=m.end_position).map(move |p| (&m.sentence_id, p)))
        .collect();

    let per_sentence: Vec<Result<Tally, EvalError>> = inputs
        .corpus
        .sentences()
        .par_iter()
        .map(|s| evaluate_sentence(&inputs, s, &entity_tokens, inventory, scorer, config))
        .collect();
    let mut tally = Tally::default();
    for t in per_sentence {
        tally = tally.merge(t?);
    }
    Ok(EvaluationReport::from_tally(
        scorer.name(),
        config.clone(),
        &tally,
    ))
}

fn evaluate_sentence(
    inputs: &EvaluationInputs<'_>,
    sentence: &Sentence,
    entity_tokens: &HashSet<(&SentenceId, usize)>,
    inventory: &SenseInventory,
    scorer: &dyn TsvScorer,
    config: &EvaluationConfig,
) -> Result<Tally, EvalError> {
    let mut tally = Tally::default();
    for token in &sentence.tokens {
        tally.eligible += 1;
        let skip = &mut tally.skipped;
        match token.token_class {
            TokenClass::Digit => {
                skip.digits += 1;
                continue;
            }
            TokenClass::Punctuation => {
                skip.punctuation += 1;
                continue;
            }
            _ => {}
        }
        if entity_tokens.contains(&(&sentence.sentence_id, token.position)) {
            skip.entity_tokens += 1;
            continue;
        }
        if token.token_class == TokenClass::FunctionWord && !config.include_function_words {
            skip.function_words_excluded += 1;
            continue;
        }
        let candidates = match lookup_candidate_glosses(
            sentence,
            token,
            inventory,
            config.lemma_mode,
            inputs.lemmatizer,
        ) {
            Ok(c) if c.is_empty() => {
                skip.no_candidates += 1;
                continue;
            }
            Ok(c) => c,
            Err(WsdError::MissingGoldLemma(_) | WsdError::LemmaNotFound { .. }) => {
                skip.lemma_miss += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };

        let token_ref = TokenRef::new(sentence.sentence_id.clone(), token.position);
        if inputs.gold.senses(&token_ref, inventory.id()).is_none() {
            if config.skip_unannotated {
                skip.unannotated += 1;
                continue;
            }
            return Err(EvalError::IncompleteGold {
                token: token_ref,
                inventory: inventory.id().clone(),
            });
        }
        let window = extract_window(sentence, token.position, config.window)
            .expect("position comes from the sentence");
        let pairs = build_pairs(&window, &candidates, config.markup);
        let scores = score_pairs(scorer, &pairs)?;
        let ranked = rank_glosses(&scores);

        let entry = tally.by_class.entry(token.token_class).or_default();
        entry.evaluated += 1;
        for k in 1..=TOP_K {
            let hit = ranked.iter().take(k).any(|s| {
                inputs
                    .gold
                    .is_correct(&token_ref, inventory.id(), s, config.correctness_threshold)
            });
            if hit {
                entry.correct_at[k - 1] += 1;
            }
        }
    }
    Ok(tally)
}

#[cfg(test)]
mod tests;
