use std::sync::Arc;

use chrono::Utc;
use proptest::prelude::*;

use super::*;
use crate::model::{Lemma, ScoreCategory, ScoredSenseAnnotation, Sense, TokenClass};

fn sentence(words: &[(&str, TokenClass, Option<&str>)]) -> Sentence {
    let tokens = words
        .iter()
        .enumerate()
        .map(|(i, (w, c, l))| Token {
            position: i,
            surface: (*w).into(),
            token_class: *c,
            gold_lemma_id: l.map(LemmaId::new),
        })
        .collect();
    Sentence::new("s1".into(), tokens).unwrap()
}

fn bank_sentence() -> Sentence {
    sentence(&[
        ("he", TokenClass::FunctionWord, Some("he")),
        ("sat", TokenClass::Verb, Some("sit")),
        ("on", TokenClass::FunctionWord, Some("on")),
        ("the", TokenClass::FunctionWord, Some("the")),
        ("bank", TokenClass::Noun, Some("bank")),
        ("2", TokenClass::Digit, None),
        (".", TokenClass::Punctuation, None),
    ])
}

fn inventory() -> SenseInventory {
    let lemma = |id: &str| Lemma {
        lemma_id: id.into(),
        citation_form: id.into(),
        pos: String::new(),
    };
    let sense = |id: &str, lemma: &str, rank: usize, gloss: &str| Sense {
        sense_id: id.into(),
        lemma_id: lemma.into(),
        gloss: gloss.into(),
        inventory_id: "m".into(),
        rank_in_lemma: rank,
        is_proper_noun: false,
    };
    SenseInventory::new(
        "m".into(),
        vec![lemma("bank"), lemma("sit")],
        vec![
            sense("bank.money", "bank", 0, "financial institution"),
            sense("bank.river", "bank", 1, "sloping land beside water"),
            sense("bank.store", "bank", 2, "a stored supply"),
            sense("sit.1", "sit", 0, "be seated"),
        ],
    )
    .unwrap()
}

fn gold(sense: &str) -> Arc<GoldStandard> {
    let a = |s: &str, c| ScoredSenseAnnotation {
        sentence_id: "s1".into(),
        token_position: 4,
        sense_id: s.into(),
        inventory_id: "m".into(),
        category: c,
        annotator_id: "a1".into(),
        timestamp: Utc::now(),
    };
    let anns: Vec<_> = ["bank.money", "bank.river", "bank.store"]
        .iter()
        .map(|s| {
            a(
                s,
                if *s == sense {
                    ScoreCategory::Explicate
                } else {
                    ScoreCategory::Different
                },
            )
        })
        .collect();
    Arc::new(GoldStandard::from_annotations(&anns))
}

#[test]
fn markup_variants() {
    let s = bank_sentence();
    let w = extract_window(&s, 4, WindowSize::Tokens(3)).unwrap();
    assert_eq!(render_context(&w, Markup::None), "the bank 2");
    assert_eq!(
        render_context(&w, Markup::XmlToken),
        "the <token>bank</token> 2"
    );
    assert_eq!(
        render_context(&w, Markup::Unused0),
        "the [UNUSED0] bank [UNUSED0] 2"
    );
    for m in [Markup::None, Markup::XmlToken, Markup::Unused0] {
        assert_eq!(strip_markup(&render_context(&w, m), m), w.plain_text());
        assert_eq!(m.to_string().parse::<Markup>(), Ok(m));
    }
}

#[test]
fn candidate_lookup() {
    let s = bank_sentence();
    let inv = inventory();
    let c = lookup_candidate_glosses(&s, &s.tokens[4], &inv, LemmaMode::Gold, None).unwrap();
    let ids: Vec<_> = c.iter().map(|s| s.sense_id.as_str()).collect();
    assert_eq!(ids, ["bank.money", "bank.river", "bank.store"]);

    // function word whose lemma is not listed
    assert!(
        lookup_candidate_glosses(&s, &s.tokens[0], &inv, LemmaMode::Gold, None)
            .unwrap()
            .is_empty()
    );
    assert!(matches!(
        lookup_candidate_glosses(&s, &s.tokens[5], &inv, LemmaMode::Gold, None),
        Err(WsdError::NotSenseBearing { .. })
    ));
    assert!(matches!(
        lookup_candidate_glosses(&s, &s.tokens[4], &inv, LemmaMode::External, None),
        Err(WsdError::NoLemmatizer)
    ));
    let table: LemmaTable = [("bank".to_owned(), LemmaId::new("bank"))]
        .into_iter()
        .collect();
    assert_eq!(
        lookup_candidate_glosses(&s, &s.tokens[4], &inv, LemmaMode::External, Some(&table))
            .unwrap()
            .len(),
        3
    );
    assert!(matches!(
        lookup_candidate_glosses(&s, &s.tokens[1], &inv, LemmaMode::External, Some(&table)),
        Err(WsdError::LemmaNotFound { .. })
    ));

    let no_gold = sentence(&[("bank", TokenClass::Noun, None)]);
    assert!(matches!(
        lookup_candidate_glosses(&no_gold, &no_gold.tokens[0], &inv, LemmaMode::Gold, None),
        Err(WsdError::MissingGoldLemma(_))
    ));
}

fn score(id: &str, rank: usize, t: f64) -> TsvScore {
    TsvScore {
        sense_id: id.into(),
        rank_in_lemma: rank,
        true_confidence: t,
        false_confidence: 1.0 - t,
    }
}

#[test]
fn ranking_breaks_ties_by_lexicon_rank() {
    let r = rank_glosses(&[score("c", 2, 0.5), score("a", 0, 0.2), score("b", 1, 0.5)]);
    assert_eq!(
        r,
        vec![SenseId::new("b"), SenseId::new("c"), SenseId::new("a")]
    );
    let r = rank_glosses(&[score("z", 1, 0.9), score("y", 0, 0.9)]);
    assert_eq!(r, vec![SenseId::new("y"), SenseId::new("z")]);
}

#[test]
fn gold_oracle_ranks_gold_first() {
    let s = bank_sentence();
    let inv = inventory();
    for target in ["bank.money", "bank.river", "bank.store"] {
        let scorer = GoldOracleScorer::new(gold(target), ScoreCategory::Referral);
        let ranked = disambiguate(&s, 4, &inv, &scorer, &PipelineConfig::default(), None).unwrap();
        assert_eq!(ranked[0].as_str(), target);
        let adv = AdversarialScorer::new(gold(target), ScoreCategory::Referral);
        let ranked = disambiguate(&s, 4, &inv, &adv, &PipelineConfig::default(), None).unwrap();
        assert_eq!(ranked.last().unwrap().as_str(), target);
    }
}

#[test]
fn disambiguate_errors() {
    let s = bank_sentence();
    let inv = inventory();
    let scorer = PseudoScorer::new(1);
    let cfg = PipelineConfig::default();
    assert!(matches!(
        disambiguate(&s, 0, &inv, &scorer, &cfg, None),
        Err(WsdError::LemmaNotFound { .. })
    ));
    assert!(matches!(
        disambiguate(&s, 99, &inv, &scorer, &cfg, None),
        Err(WsdError::TargetOutOfRange(_))
    ));
}

struct Broken(Vec<Confidence>);

impl TsvScorer for Broken {
    fn name(&self) -> String {
        "broken".into()
    }

    fn score(&self, _pairs: &[ContextGlossPair]) -> Result<Vec<Confidence>, ScorerError> {
        Ok(self.0.clone())
    }
}

#[test]
fn misbehaving_scorers_are_protocol_errors() {
    let s = bank_sentence();
    let inv = inventory();
    let cfg = PipelineConfig::default();
    let short = Broken(vec![Confidence::new(0.5, 0.5)]);
    assert!(matches!(
        disambiguate(&s, 4, &inv, &short, &cfg, None),
        Err(WsdError::ScorerProtocolError(_))
    ));
    let out_of_range = Broken(vec![Confidence::new(1.5, 0.0); 3]);
    assert!(matches!(
        disambiguate(&s, 4, &inv, &out_of_range, &cfg, None),
        Err(WsdError::ScorerProtocolError(_))
    ));
    let nan = Broken(vec![Confidence::new(f64::NAN, 0.0); 3]);
    assert!(matches!(
        disambiguate(&s, 4, &inv, &nan, &cfg, None),
        Err(WsdError::ScorerProtocolError(_))
    ));
}

#[test]
fn unreachable_remote_scorer_is_unavailable() {
    let mut cfg = RemoteScorerConfig::new("http://127.0.0.1:9/score");
    cfg.timeout_ms = 2_000;
    let scorer = RemoteScorer::new(cfg);
    let s = bank_sentence();
    let err = disambiguate(
        &s,
        4,
        &inventory(),
        &scorer,
        &PipelineConfig::default(),
        None,
    )
    .unwrap_err();
    assert!(matches!(err, WsdError::ScorerUnavailable(_)), "{err:?}");
}

#[test]
fn gold_prefers_smallest_annotator_id() {
    let a = |who: &str, c| ScoredSenseAnnotation {
        sentence_id: "s1".into(),
        token_position: 4,
        sense_id: "bank.river".into(),
        inventory_id: "m".into(),
        category: c,
        annotator_id: who.into(),
        timestamp: Utc::now(),
    };
    let g = GoldStandard::from_annotations(&[
        a("a3", ScoreCategory::Different),
        a("a1", ScoreCategory::General),
    ]);
    let t = TokenRef::new("s1".into(), 4);
    assert_eq!(
        g.category(&t, &"m".into(), &"bank.river".into()),
        Some(ScoreCategory::General)
    );
}

#[test]
fn scorer_specs_parse() {
    assert_eq!(
        "gold-oracle".parse::<ScorerSpec>(),
        Ok(ScorerSpec::GoldOracle)
    );
    assert_eq!(
        "pseudo:42".parse::<ScorerSpec>(),
        Ok(ScorerSpec::Pseudo { seed: 42 })
    );
    assert!(matches!(
        "http://x/y".parse::<ScorerSpec>(),
        Ok(ScorerSpec::Remote(_))
    ));
    assert!("bert".parse::<ScorerSpec>().is_err());
    let json = serde_json::to_string(&ScorerSpec::Pseudo { seed: 3 }).unwrap();
    assert_eq!(json, r#"{"kind":"pseudo","seed":3}"#);
    let remote: ScorerSpec =
        serde_json::from_str(r#"{"kind":"remote","endpoint":"http://h/s"}"#).unwrap();
    assert_eq!(
        remote,
        ScorerSpec::Remote(RemoteScorerConfig::new("http://h/s"))
    );
}

fn words() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec("[a-z]{1,6}", 1..30)
}

fn plain(ws: &[String]) -> Sentence {
    let tokens = ws
        .iter()
        .enumerate()
        .map(|(i, w)| Token {
            position: i,
            surface: w.clone(),
            token_class: TokenClass::Noun,
            gold_lemma_id: None,
        })
        .collect();
    Sentence::new("p".into(), tokens).unwrap()
}

proptest! {
    #[test]
    fn window_length_formula(ws in words(), pos in 0usize..30, size in prop::sample::select(vec![3u8, 5, 7, 9, 11])) {
        let s = plain(&ws);
        let n = s.len();
        let w = extract_window(&s, pos, WindowSize::Tokens(size));
        if pos >= n {
            prop_assert!(w.is_none());
        } else {
            let w = w.unwrap();
            let h = (size as usize - 1) / 2;
            let expected = (pos + h).min(n - 1) - pos.saturating_sub(h) + 1;
            prop_assert_eq!(w.tokens.len(), expected);
            prop_assert_eq!(w.target(), ws[pos].as_str());
            prop_assert_eq!(&w.tokens[..], &ws[w.start..w.start + expected]);
        }
    }

    #[test]
    fn markup_round_trips(ws in words(), pos in 0usize..30) {
        let s = plain(&ws);
        prop_assume!(pos < s.len());
        let w = extract_window(&s, pos, WindowSize::All).unwrap();
        for m in [Markup::None, Markup::XmlToken, Markup::Unused0] {
            prop_assert_eq!(strip_markup(&render_context(&w, m), m), w.plain_text());
        }
    }

    #[test]
    fn pseudo_scores_are_independent_per_pair(seed in any::<u64>(), ws in words(), pos in 0usize..30) {
        let s = sentence(&[("bank", TokenClass::Noun, Some("bank"))]);
        let inv = inventory();
        let cands = lookup_candidate_glosses(&s, &s.tokens[0], &inv, LemmaMode::Gold, None).unwrap();
        let body = plain(&ws);
        prop_assume!(pos < body.len());
        let w = extract_window(&body, pos, WindowSize::Tokens(5)).unwrap();
        let pairs = build_pairs(&w, &cands, Markup::Unused0);
        let scorer = PseudoScorer::new(seed);
        let batch = scorer.score(&pairs).unwrap();
        for (p, c) in pairs.iter().zip(&batch) {
            let single = scorer.score(std::slice::from_ref(p)).unwrap();
            prop_assert_eq!(&single[0], c);
            prop_assert!((0.0..1.0).contains(&c.true_confidence));
        }
    }

    #[test]
    fn ranking_is_a_permutation_sorted_by_confidence(ts in prop::collection::vec(0u8..4, 1..8)) {
        let scores: Vec<TsvScore> = ts
            .iter()
            .enumerate()
            .map(|(i, &t)| score(&format!("s{i}"), i, f64::from(t) / 4.0))
            .collect();
        let ranked = rank_glosses(&scores);
        prop_assert_eq!(ranked.len(), scores.len());
        let by_id = |id: &SenseId| scores.iter().find(|s| &s.sense_id == id).unwrap();
        for pair in ranked.windows(2) {
            let (a, b) = (by_id(&pair[0]), by_id(&pair[1]));
            prop_assert!(
                a.true_confidence > b.true_confidence
                    || (a.true_confidence == b.true_confidence && a.rank_in_lemma < b.rank_in_lemma)
            );
        }
    }
}
