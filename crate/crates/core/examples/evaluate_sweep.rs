//! Top-k accuracy over every window size for the reference scorers.
//!
//!     cargo run --release --example evaluate_sweep

use std::sync::Arc;

use sensekit::evaluation::{sweep, EvaluationConfig, EvaluationInputs};
use sensekit::render::sweep_table;
use sensekit::synthetic::{generate, SyntheticSpec};
use sensekit::wsd::{
    AdversarialScorer, GoldOracleScorer, GoldStandard, Lemmatizer, PseudoScorer, TsvScorer,
    WindowSize,
};

fn main() {
    let s = generate(&SyntheticSpec {
        sentences: 150,
        ..SyntheticSpec::default()
    });
    let gold = Arc::new(GoldStandard::from_annotations(&s.annotations));
    let base = EvaluationConfig::new("modern".into(), WindowSize::Tokens(11));
    let oracle = GoldOracleScorer::new(gold.clone(), base.correctness_threshold);
    let adversary = AdversarialScorer::new(gold.clone(), base.correctness_threshold);
    let pseudo = PseudoScorer::new(3);
    let scorers: [&dyn TsvScorer; 3] = [&oracle, &adversary, &pseudo];
    let inputs = EvaluationInputs {
        corpus: &s.corpus,
        gold: &gold,
        mentions: &s.mentions,
        lemmatizer: Some(&s.lemma_table as &dyn Lemmatizer),
    };
    let report = sweep(
        inputs,
        &s.inventory_refs(),
        &scorers,
        &WindowSize::SIZES,
        &base,
    );
    print!("{}", sweep_table(&report));
}
