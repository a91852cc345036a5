//! Seeded synthetic corpora with two inventories and consistent annotations.
//!
//! The generated data satisfies every validation rule: each annotated token
//! has exactly one Explicate or General sense per inventory, all other
//! senses score below the correctness threshold, and proper-noun tokens score
//! every sibling sense Different. Every lemma has at least two senses, so a
//! wrong sense always exists. Optional double annotation perturbs categories
//! to give realistic but imperfect agreement.

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::model::{
    AnnotatorId, Corpus, EntityMention, EntityType, InventoryId, Lemma, LemmaId, ScoreCategory,
    ScoredSenseAnnotation, Sense, SenseId, SenseInventory, Sentence, SentenceId, Token, TokenClass,
    DIGIT_SENSE, PUNCT_SENSE, SYSTEM_INVENTORY,
};
use crate::wsd::LemmaTable;

#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub sentences: usize,
    pub min_len: usize,
    pub max_len: usize,
    pub noun_lemmas: usize,
    pub verb_lemmas: usize,
    pub function_lemmas: usize,
    pub proper_lemmas: usize,
    /// Senses per lemma are drawn from `2..=max_senses`.
    pub max_senses: usize,
    pub inventories: Vec<InventoryId>,
    /// Share of content tokens re-annotated by the two extra annotators.
    pub double_annotation: f64,
    /// Per-score probability that a second annotator moves one rank.
    pub noise: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            seed: 7,
            sentences: 40,
            min_len: 6,
            max_len: 16,
            noun_lemmas: 30,
            verb_lemmas: 10,
            function_lemmas: 6,
            proper_lemmas: 5,
            max_senses: 4,
            inventories: vec!["modern".into(), "ghani".into()],
            double_annotation: 0.0,
            noise: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub corpus: Corpus,
    pub inventories: Vec<SenseInventory>,
    pub annotations: Vec<ScoredSenseAnnotation>,
    pub mentions: Vec<EntityMention>,
    pub lemma_table: LemmaTable,
}

impl SyntheticCorpus {
    pub fn inventory(&self, id: &str) -> Option<&SenseInventory> {
        self.inventories.iter().find(|i| i.id().as_str() == id)
    }

    pub fn inventory_refs(&self) -> Vec<&SenseInventory> {
        self.inventories.iter().collect()
    }
}

pub const PRIMARY_ANNOTATOR: &str = "a1";
pub const SECOND_ANNOTATORS: [&str; 2] = ["a2", "a3"];

#[derive(Clone)]
struct LemmaSpec {
    id: LemmaId,
    class: TokenClass,
    proper: bool,
    surfaces: Vec<String>,
}

pub fn base_time() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2023, 1, 1, 0, 0, 0)
        .single()
        .expect("valid date")
}

pub fn generate(spec: &SyntheticSpec) -> SyntheticCorpus {
    let mut rng = StdRng::seed_from_u64(spec.seed);

    let mut lemmas: Vec<LemmaSpec> = Vec::new();
    let mut add = |prefix: &str, n: usize, class: TokenClass, proper: bool, rng: &mut StdRng| {
        for i in 0..n {
            let id = format!("{prefix}{i}");
            let forms = rng.random_range(1..=3);
            let surfaces = (0..forms).map(|f| format!("{id}_{f}")).collect();
            lemmas.push(LemmaSpec {
                id: LemmaId::new(id),
                class,
                proper,
                surfaces,
            });
        }
    };
    add("noun", spec.noun_lemmas, TokenClass::Noun, false, &mut rng);
    add("verb", spec.verb_lemmas, TokenClass::Verb, false, &mut rng);
    add(
        "func",
        spec.function_lemmas,
        TokenClass::FunctionWord,
        false,
        &mut rng,
    );
    add("name", spec.proper_lemmas, TokenClass::Noun, true, &mut rng);

    let inventories: Vec<SenseInventory> = spec
        .inventories
        .iter()
        .map(|inv| {
            let mut ls = Vec::new();
            let mut ss = Vec::new();
            for l in &lemmas {
                ls.push(Lemma {
                    lemma_id: l.id.clone(),
                    citation_form: l.id.as_str().to_owned(),
                    pos: l.class.as_str().to_owned(),
                });
                let n = rng.random_range(2..=spec.max_senses.max(2));
                for r in 0..n {
                    ss.push(Sense {
                        sense_id: SenseId::new(format!("{inv}:{}:{r}", l.id)),
                        lemma_id: l.id.clone(),
                        gloss: format!("{inv} gloss {r} of {}", l.id),
                        inventory_id: inv.clone(),
                        rank_in_lemma: r,
                        is_proper_noun: l.proper && r == 0,
                    });
                }
            }
            SenseInventory::new(inv.clone(), ls, ss).expect("generated inventory is valid")
        })
        .collect();

    let lemma_table: LemmaTable = lemmas
        .iter()
        .flat_map(|l| l.surfaces.iter().map(move |s| (s.clone(), l.id.clone())))
        .collect();

    let by_class = |class: TokenClass, proper: bool| -> Vec<usize> {
        lemmas
            .iter()
            .enumerate()
            .filter(|(_, l)| l.class == class && l.proper == proper)
            .map(|(i, _)| i)
            .collect()
    };
    let nouns = by_class(TokenClass::Noun, false);
    let verbs = by_class(TokenClass::Verb, false);
    let funcs = by_class(TokenClass::FunctionWord, false);
    let names = by_class(TokenClass::Noun, true);

    let mut sentences = Vec::with_capacity(spec.sentences);
    let mut mentions = Vec::new();
    // (sentence index, position, lemma index) of content tokens
    let mut lexical: Vec<(usize, usize, usize)> = Vec::new();
    for si in 0..spec.sentences {
        let sid = SentenceId::new(format!("s{si:04}"));
        let len = rng.random_range(spec.min_len..=spec.max_len.max(spec.min_len));
        let mut tokens: Vec<Token> = Vec::with_capacity(len);
        while tokens.len() < len {
            let pos = tokens.len();
            let roll: f64 = rng.random();
            let pick = |pool: &[usize], rng: &mut StdRng| -> Option<usize> {
                (!pool.is_empty()).then(|| pool[rng.random_range(0..pool.len())])
            };
            let lemma = if roll < 0.06 {
                tokens.push(Token {
                    position: pos,
                    surface: format!("{}", rng.random_range(1..2000)),
                    token_class: TokenClass::Digit,
                    gold_lemma_id: Some(LemmaId::new(DIGIT_SENSE)),
                });
                continue;
            } else if roll < 0.16 {
                let p = [".", ",", ":", "؟", "،"][rng.random_range(0..5)];
                tokens.push(Token {
                    position: pos,
                    surface: p.to_owned(),
                    token_class: TokenClass::Punctuation,
                    gold_lemma_id: Some(LemmaId::new(PUNCT_SENSE)),
                });
                continue;
            } else if roll < 0.22 {
                pick(&names, &mut rng)
            } else if roll < 0.40 {
                pick(&funcs, &mut rng)
            } else if roll < 0.52 {
                pick(&verbs, &mut rng)
            } else {
                pick(&nouns, &mut rng)
            };
            let Some(li) = lemma.or_else(|| pick(&nouns, &mut rng)) else {
                continue;
            };
            let l = &lemmas[li];
            let surface = l.surfaces[rng.random_range(0..l.surfaces.len())].clone();
            if l.proper {
                let ty = EntityType::ALL[rng.random_range(0..4)];
                mentions.push(EntityMention {
                    sentence_id: sid.clone(),
                    start_position: pos,
                    end_position: pos,
                    entity_type: ty,
                });
            }
            lexical.push((si, pos, li));
            tokens.push(Token {
                position: pos,
                surface,
                token_class: l.class,
                gold_lemma_id: Some(l.id.clone()),
            });
        }
        sentences.push(Sentence::new(sid, tokens).expect("generated sentence is valid"));
    }

    let mut clock = 0i64;
    let mut stamp = || {
        clock += 1;
        base_time() + Duration::seconds(clock)
    };
    let mut annotations = Vec::new();
    let primary = AnnotatorId::new(PRIMARY_ANNOTATOR);

    for s in &sentences {
        for t in s.tokens.iter().filter(|t| t.token_class.is_sentinel()) {
            let sense = if t.token_class == TokenClass::Digit {
                DIGIT_SENSE
            } else {
                PUNCT_SENSE
            };
            annotations.push(ScoredSenseAnnotation {
                sentence_id: s.sentence_id.clone(),
                token_position: t.position,
                sense_id: SenseId::new(sense),
                inventory_id: InventoryId::new(SYSTEM_INVENTORY),
                category: ScoreCategory::Explicate,
                annotator_id: primary.clone(),
                timestamp: stamp(),
            });
        }
    }

    let second: Vec<AnnotatorId> = SECOND_ANNOTATORS
        .iter()
        .map(|a| AnnotatorId::new(*a))
        .collect();
    for &(si, pos, li) in &lexical {
        let sid = &sentences[si].sentence_id;
        let l = &lemmas[li];
        let double = rng.random_bool(spec.double_annotation.clamp(0.0, 1.0));
        let extra = &second[rng.random_range(0..second.len())];
        for inv in &inventories {
            let senses = inv.senses_of(&l.id);
            let gold = if l.proper {
                0
            } else {
                rng.random_range(0..senses.len())
            };
            let cats: Vec<ScoreCategory> = senses
                .iter()
                .enumerate()
                .map(|(r, _)| {
                    if r == gold {
                        if rng.random_bool(0.75) {
                            ScoreCategory::Explicate
                        } else {
                            ScoreCategory::General
                        }
                    } else if l.proper {
                        ScoreCategory::Different
                    } else {
                        [
                            ScoreCategory::Related,
                            ScoreCategory::RootSemantics,
                            ScoreCategory::Different,
                            ScoreCategory::Different,
                        ][rng.random_range(0..4)]
                    }
                })
                .collect();
            for (sense, &cat) in senses.iter().zip(&cats) {
                annotations.push(ScoredSenseAnnotation {
                    sentence_id: sid.clone(),
                    token_position: pos,
                    sense_id: sense.sense_id.clone(),
                    inventory_id: inv.id().clone(),
                    category: cat,
                    annotator_id: primary.clone(),
                    timestamp: stamp(),
                });
            }
            if double {
                for (sense, &cat) in senses.iter().zip(&cats) {
                    let cat = if rng.random_bool(spec.noise.clamp(0.0, 1.0)) {
                        let i = cat.index();
                        let j = if i == 0 || (i < 5 && rng.random_bool(0.5)) {
                            i + 1
                        } else {
                            i - 1
                        };
                        ScoreCategory::from_index(j).expect("index in range")
                    } else {
                        cat
                    };
                    annotations.push(ScoredSenseAnnotation {
                        sentence_id: sid.clone(),
                        token_position: pos,
                        sense_id: sense.sense_id.clone(),
                        inventory_id: inv.id().clone(),
                        category: cat,
                        annotator_id: extra.clone(),
                        timestamp: stamp(),
                    });
                }
            }
        }
    }

    SyntheticCorpus {
        corpus: Corpus::new(sentences).expect("unique sentence ids"),
        inventories,
        annotations,
        mentions,
        lemma_table,
    }
}
