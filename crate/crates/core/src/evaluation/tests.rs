use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::synthetic::{generate, SyntheticCorpus, SyntheticSpec};
use crate::wsd::{disambiguate, AdversarialScorer, GoldOracleScorer, PipelineConfig, PseudoScorer};

fn corpus(seed: u64) -> SyntheticCorpus {
    generate(&SyntheticSpec {
        seed,
        sentences: 15,
        ..SyntheticSpec::default()
    })
}

fn inputs<'a>(s: &'a SyntheticCorpus, gold: &'a GoldStandard) -> EvaluationInputs<'a> {
    EvaluationInputs {
        corpus: &s.corpus,
        gold,
        mentions: &s.mentions,
        lemmatizer: Some(&s.lemma_table),
    }
}

fn config(inv: &str) -> EvaluationConfig {
    EvaluationConfig::new(inv.into(), WindowSize::Tokens(11))
}

#[test]
fn oracle_and_adversary_bound_the_scale() {
    let s = corpus(3);
    let gold = Arc::new(GoldStandard::from_annotations(&s.annotations));
    for inv in s.inventory_refs() {
        let cfg = config(inv.id().as_str());
        let oracle = GoldOracleScorer::new(gold.clone(), cfg.correctness_threshold);
        let r = evaluate(inputs(&s, &gold), inv, &oracle, &cfg).unwrap();
        assert!(r.evaluated > 0);
        assert_eq!(r.top1, Some(1.0));
        assert_eq!(r.noun.top1, Some(1.0));

        let adv = AdversarialScorer::new(gold.clone(), cfg.correctness_threshold);
        let r = evaluate(inputs(&s, &gold), inv, &adv, &cfg).unwrap();
        assert_eq!(r.top1, Some(0.0));
    }
}

#[test]
fn counts_add_up() {
    let s = corpus(5);
    let gold = GoldStandard::from_annotations(&s.annotations);
    let inv = s.inventory("modern").unwrap();
    let mut cfg = config("modern");
    cfg.include_function_words = true;
    let r = evaluate(inputs(&s, &gold), inv, &PseudoScorer::new(9), &cfg).unwrap();
    assert_eq!(r.eligible, s.corpus.token_count());
    assert_eq!(
        r.eligible,
        r.evaluated + r.evaluated_function_words + r.skipped.total()
    );
    assert_eq!(r.skipped.function_words_excluded, 0);
    assert!(r.evaluated_function_words > 0);
    assert!(r.skipped.entity_tokens > 0);

    cfg.include_function_words = false;
    let r2 = evaluate(inputs(&s, &gold), inv, &PseudoScorer::new(9), &cfg).unwrap();
    assert_eq!(r2.evaluated_function_words, 0);
    assert_eq!(
        r2.skipped.function_words_excluded,
        r.evaluated_function_words
    );
    // Function words never move the headline numbers.
    assert_eq!((r.top1, r.top2, r.top3), (r2.top1, r2.top2, r2.top3));
}

#[test]
fn matches_sequential_per_token_pipeline() {
    let s = corpus(11);
    let gold = GoldStandard::from_annotations(&s.annotations);
    let scorer = PseudoScorer::new(4);
    for inv in s.inventory_refs() {
        let cfg = config(inv.id().as_str());
        let r = evaluate(inputs(&s, &gold), inv, &scorer, &cfg).unwrap();
        let entity: HashSet<(SentenceId, usize)> = s
            .mentions
            .iter()
            .flat_map(|m| {
                (m.start_position..=m.end_position).map(move |p| (m.sentence_id.clone(), p))
            })
            .collect();
        let (mut n, mut hits) = (0usize, [0usize; TOP_K]);
        let pipeline = PipelineConfig {
            window: cfg.window,
            markup: cfg.markup,
            lemma_mode: cfg.lemma_mode,
        };
        for sent in s.corpus.sentences() {
            for t in &sent.tokens {
                if !matches!(t.token_class, TokenClass::Noun | TokenClass::Verb)
                    || entity.contains(&(sent.sentence_id.clone(), t.position))
                {
                    continue;
                }
                let Ok(ranked) = disambiguate(sent, t.position, inv, &scorer, &pipeline, None)
                else {
                    continue;
                };
                n += 1;
                let r = TokenRef::new(sent.sentence_id.clone(), t.position);
                for k in 1..=TOP_K {
                    if ranked
                        .iter()
                        .take(k)
                        .any(|x| gold.is_correct(&r, inv.id(), x, cfg.correctness_threshold))
                    {
                        hits[k - 1] += 1;
                    }
                }
            }
        }
        assert_eq!(r.evaluated, n);
        assert_eq!(r.top1, Some(hits[0] as f64 / n as f64));
        assert_eq!(r.top3, Some(hits[2] as f64 / n as f64));
    }
}

#[test]
fn errors() {
    let s = corpus(1);
    let gold = GoldStandard::from_annotations(&s.annotations);
    let inv = s.inventory("modern").unwrap();
    let scorer = PseudoScorer::new(0);
    assert!(matches!(
        evaluate(inputs(&s, &gold), inv, &scorer, &config("ghani")),
        Err(EvalError::InventoryMismatch { .. })
    ));

    let empty = GoldStandard::default();
    assert!(matches!(
        evaluate(inputs(&s, &empty), inv, &scorer, &config("modern")),
        Err(EvalError::IncompleteGold { .. })
    ));
    let mut cfg = config("modern");
    cfg.skip_unannotated = true;
    let r = evaluate(inputs(&s, &empty), inv, &scorer, &cfg).unwrap();
    assert_eq!(r.evaluated, 0);
    assert_eq!(r.top1, None);
    assert!(r.skipped.unannotated > 0);
}

#[test]
fn sweep_records_failures_and_continues() {
    let s = corpus(2);
    let gold = Arc::new(GoldStandard::from_annotations(&s.annotations));
    let oracle = GoldOracleScorer::new(gold.clone(), ScoreCategory::Referral);
    let remote = crate::wsd::RemoteScorer::new(crate::wsd::RemoteScorerConfig {
        timeout_ms: 1_000,
        ..crate::wsd::RemoteScorerConfig::new("http://127.0.0.1:9/")
    });
    let scorers: [&dyn TsvScorer; 2] = [&remote, &oracle];
    let r = sweep(
        inputs(&s, &gold),
        &s.inventory_refs(),
        &scorers,
        &WindowSize::SIZES,
        &config("modern"),
    );
    assert_eq!(r.cells.len(), 2 * 2 * WindowSize::SIZES.len());
    assert_eq!(r.failures().count(), 2 * WindowSize::SIZES.len());
    assert!(r.reports().all(|x| x.top1 == Some(1.0)));
}

fn small_tally() -> impl Strategy<Value = Tally> {
    (
        0usize..50,
        prop::collection::vec((0usize..5, 0usize..20, 0usize..20), 0..4),
        0usize..9,
    )
        .prop_map(|(eligible, classes, skip)| {
            let mut t = Tally {
                eligible,
                ..Tally::default()
            };
            for (c, ev, hit) in classes {
                let class = [
                    TokenClass::Noun,
                    TokenClass::Verb,
                    TokenClass::FunctionWord,
                    TokenClass::Digit,
                    TokenClass::Punctuation,
                ][c];
                let hit = hit.min(ev);
                t.by_class.insert(
                    class,
                    ClassTally {
                        evaluated: ev,
                        correct_at: [hit, hit, ev],
                    },
                );
            }
            t.skipped.lemma_miss = skip;
            t
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn top_k_is_monotone(seed in 0u64..1000, scorer_seed in any::<u64>(), w in prop::sample::select(WindowSize::SIZES.to_vec())) {
        let s = corpus(seed);
        let gold = GoldStandard::from_annotations(&s.annotations);
        for inv in s.inventory_refs() {
            let mut cfg = config(inv.id().as_str());
            cfg.window = w;
            let r = evaluate(inputs(&s, &gold), inv, &PseudoScorer::new(scorer_seed), &cfg).unwrap();
            let (a, b, c) = (r.top1.unwrap(), r.top2.unwrap(), r.top3.unwrap());
            prop_assert!(a <= b && b <= c);
        }
    }

    #[test]
    fn merge_is_associative_and_commutative(a in small_tally(), b in small_tally(), c in small_tally()) {
        prop_assert_eq!(a.clone().merge(b.clone()).merge(c.clone()), a.clone().merge(b.clone().merge(c.clone())));
        prop_assert_eq!(a.clone().merge(b.clone()), b.merge(a));
    }
}
