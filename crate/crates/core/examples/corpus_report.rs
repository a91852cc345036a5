//! Token statistics and lexicon coverage for a synthetic corpus.
//!
//!     cargo run --example corpus_report -- [SEED]

use sensekit::render::{coverage_table, statistics_table};
use sensekit::synthetic::{generate, SyntheticSpec};
use sensekit::validation::{corpus_statistics, coverage_report};

fn main() {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(7);
    let s = generate(&SyntheticSpec {
        seed,
        sentences: 200,
        ..SyntheticSpec::default()
    });
    let stats = corpus_statistics(&s.corpus, &s.annotations, &s.mentions);
    print!("{}", statistics_table(&stats));
    println!();
    let reports: Vec<_> = s
        .inventory_refs()
        .into_iter()
        .map(|inv| coverage_report(&s.corpus, &s.annotations, inv, &s.mentions))
        .collect();
    print!("{}", coverage_table(&reports));
}
