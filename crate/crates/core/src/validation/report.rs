use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::model::{
    Corpus, EntityMention, EntityType, InventoryId, LemmaId, ScoredSenseAnnotation, SenseId,
    SenseInventory, SentenceId, TokenClass, TokenRef, SYSTEM_INVENTORY,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassStats {
    pub tokens: usize,
    pub unique_tokens: usize,
    pub unique_lemmas: usize,
    pub unique_senses: usize,
}

impl std::ops::Add for ClassStats {
    type Output = ClassStats;

    fn add(self, rhs: Self) -> Self {
        ClassStats {
            tokens: self.tokens + rhs.tokens,
            unique_tokens: self.unique_tokens + rhs.unique_tokens,
            unique_lemmas: self.unique_lemmas + rhs.unique_lemmas,
            unique_senses: self.unique_senses + rhs.unique_senses,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityStats {
    pub mentions: usize,
    pub tokens: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStatistics {
    pub by_class: BTreeMap<TokenClass, ClassStats>,
    /// Column-wise sum of `by_class`.
    pub total: ClassStats,
    pub entities: BTreeMap<EntityType, EntityStats>,
    pub entity_total: EntityStats,
}

impl CorpusStatistics {
    pub fn class(&self, class: TokenClass) -> ClassStats {
        self.by_class.get(&class).copied().unwrap_or_default()
    }

    /// Digits and punctuation merged into one column.
    pub fn punct_and_digits(&self) -> ClassStats {
        self.class(TokenClass::Digit) + self.class(TokenClass::Punctuation)
    }
}

/// Token, type, lemma and sense counts per token class, plus entity counts.
///
/// Unique tokens are distinct surface strings, unique lemmas distinct gold
/// lemma ids, and unique senses distinct (inventory, sense) pairs scored as
/// correct on at least one token of the class. Totals are column sums.
pub fn corpus_statistics(
    corpus: &Corpus,
    annotations: &[ScoredSenseAnnotation],
    mentions: &[EntityMention],
) -> CorpusStatistics {
    #[derive(Default)]
    struct Acc<'a> {
        tokens: usize,
        surfaces: HashSet<&'a str>,
        lemmas: HashSet<&'a LemmaId>,
        senses: HashSet<(&'a InventoryId, &'a SenseId)>,
    }

    let mut acc: BTreeMap<TokenClass, Acc> = TokenClass::ALL
        .iter()
        .map(|c| (*c, Acc::default()))
        .collect();
    for (_, t) in corpus.occurrences() {
        let a = acc.get_mut(&t.token_class).expect("all classes present");
        a.tokens += 1;
        a.surfaces.insert(&t.surface);
        if let Some(l) = &t.gold_lemma_id {
            a.lemmas.insert(l);
        }
    }
    for ann in annotations.iter().filter(|a| a.category.is_correct()) {
        if let Some(t) = corpus.token(&ann.token()) {
            acc.get_mut(&t.token_class)
                .expect("all classes present")
                .senses
                .insert((&ann.inventory_id, &ann.sense_id));
        }
    }

    let by_class: BTreeMap<TokenClass, ClassStats> = acc
        .into_iter()
        .map(|(c, a)| {
            (
                c,
                ClassStats {
                    tokens: a.tokens,
                    unique_tokens: a.surfaces.len(),
                    unique_lemmas: a.lemmas.len(),
                    unique_senses: a.senses.len(),
                },
            )
        })
        .collect();
    let total = by_class.values().fold(ClassStats::default(), |x, y| x + *y);

    let mut entities: BTreeMap<EntityType, EntityStats> = EntityType::ALL
        .iter()
        .map(|t| (*t, EntityStats::default()))
        .collect();
    for m in mentions {
        let e = entities.get_mut(&m.entity_type).expect("all types present");
        e.mentions += 1;
        e.tokens += m.len();
    }
    let entity_total = entities
        .values()
        .fold(EntityStats::default(), |x, y| EntityStats {
            mentions: x.mentions + y.mentions,
            tokens: x.tokens + y.tokens,
        });

    CorpusStatistics {
        by_class,
        total,
        entities,
        entity_total,
    }
}

/// A count pair and its quotient; `ratio` is `None` when `total` is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub covered: usize,
    pub total: usize,
    pub ratio: Option<f64>,
}

impl Ratio {
    pub fn new(covered: usize, total: usize) -> Self {
        Self {
            covered,
            total,
            ratio: (total > 0).then(|| covered as f64 / total as f64),
        }
    }

    pub fn percent(&self) -> Option<f64> {
        self.ratio.map(|r| r * 100.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub inventory_id: InventoryId,
    pub lemma_coverage: Ratio,
    pub sense_coverage_excl_proper: Ratio,
    pub proper_noun_sense_coverage: Ratio,
}

/// How well one inventory covers the lemmas and senses the corpus needs.
///
/// Only non-sentinel tokens that carry at least one annotation count.
/// Lemma coverage is over their distinct gold lemmas. A needed sense is
/// either a distinct correct (>= 60) sense of this inventory, or, for
/// tokens with no correct sense here, a distinct missing-sense slot keyed
/// by lemma. Slots on tokens inside entity mentions and proper-noun senses
/// are counted in the proper-noun ratio; everything else in the sense ratio.
pub fn coverage_report(
    corpus: &Corpus,
    annotations: &[ScoredSenseAnnotation],
    inventory: &SenseInventory,
    mentions: &[EntityMention],
) -> CoverageReport {
    let entity_tokens: HashSet<(&SentenceId, usize)> = mentions
        .iter()
        .flat_map(|m| (m.start_position..=m.end_position).map(move |p| (&m.sentence_id, p)))
        .collect();

    let mut annotated: BTreeSet<TokenRef> = BTreeSet::new();
    let mut gold_here: BTreeMap<TokenRef, BTreeSet<&SenseId>> = BTreeMap::new();
    for a in annotations {
        if a.inventory_id.as_str() == SYSTEM_INVENTORY {
            continue;
        }
        let r = a.token();
        match corpus.token(&r) {
            Some(t) if !t.token_class.is_sentinel() => {}
            _ => continue,
        }
        if a.inventory_id == *inventory.id() && a.category.is_correct() {
            gold_here.entry(r.clone()).or_default().insert(&a.sense_id);
        }
        annotated.insert(r);
    }

    let mut lemmas: BTreeSet<&LemmaId> = BTreeSet::new();
    let mut covered_regular: BTreeSet<&SenseId> = BTreeSet::new();
    let mut covered_proper: BTreeSet<&SenseId> = BTreeSet::new();
    let mut gap_regular: BTreeSet<String> = BTreeSet::new();
    let mut gap_proper: BTreeSet<String> = BTreeSet::new();

    for r in &annotated {
        let token = corpus.token(r).expect("filtered above");
        if let Some(l) = &token.gold_lemma_id {
            lemmas.insert(l);
        }
        match gold_here.get(r) {
            Some(senses) => {
                for id in senses {
                    match inventory.sense(id) {
                        Some(s) if s.is_proper_noun => covered_proper.insert(*id),
                        _ => covered_regular.insert(*id),
                    };
                }
            }
            None => {
                let key = token
                    .gold_lemma_id
                    .as_ref()
                    .map(|l| l.as_str().to_owned())
                    .unwrap_or_else(|| format!("surface:{}", token.surface));
                if entity_tokens.contains(&(&r.sentence_id, r.token_position)) {
                    gap_proper.insert(key);
                } else {
                    gap_regular.insert(key);
                }
            }
        }
    }

    let lemma_hits = lemmas
        .iter()
        .filter(|l| inventory.contains_lemma(l))
        .count();
    CoverageReport {
        inventory_id: inventory.id().clone(),
        lemma_coverage: Ratio::new(lemma_hits, lemmas.len()),
        sense_coverage_excl_proper: Ratio::new(
            covered_regular.len(),
            covered_regular.len() + gap_regular.len(),
        ),
        proper_noun_sense_coverage: Ratio::new(
            covered_proper.len(),
            covered_proper.len() + gap_proper.len(),
        ),
    }
}
