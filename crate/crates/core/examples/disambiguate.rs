//! Rank the senses of one token: window, markup, pairs, scores, ranking.
//!
//!     cargo run --example disambiguate

use sensekit::formats::{read_corpus, read_lexicon};
use sensekit::wsd::{
    build_pairs, extract_window, lookup_candidate_glosses, rank_glosses, score_pairs, LemmaMode,
    Markup, PseudoScorer, WindowSize,
};

fn main() -> anyhow::Result<()> {
    let corpus = read_corpus(&fixture("corpus.jsonl"))?;
    let modern = read_lexicon("modern".into(), &fixture("modern.jsonl"))?;
    let sentence = corpus.sentence(&"s4".into()).expect("fixture sentence");
    let position = 5;

    let scorer = PseudoScorer::new(42);
    for (window, markup) in [
        (WindowSize::Tokens(3), Markup::XmlToken),
        (WindowSize::Tokens(5), Markup::Unused0),
        (WindowSize::All, Markup::None),
    ] {
        let w = extract_window(sentence, position, window).expect("position in range");
        let token = sentence.token(position).expect("position in range");
        let candidates = lookup_candidate_glosses(sentence, token, &modern, LemmaMode::Gold, None)?;
        let pairs = build_pairs(&w, &candidates, markup);
        let scores = score_pairs(&scorer, &pairs)?;
        println!("window {window}, markup {markup}: {}", pairs[0].context);
        for s in &scores {
            println!("  {:<14} true={:.3}", s.sense_id, s.true_confidence);
        }
        let ranked: Vec<String> = rank_glosses(&scores)
            .iter()
            .map(|s| s.to_string())
            .collect();
        println!("  ranking: {}", ranked.join(" > "));
    }
    Ok(())
}

fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}
