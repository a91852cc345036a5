//! Run the three annotation rules on the fixture corpus, then break one.
//!
//!     cargo run --example validate

use sensekit::formats::{read_annotations, read_corpus, read_lexicon};
use sensekit::model::ScoreCategory;
use sensekit::render::flags_table;
use sensekit::validation::validate;

fn main() -> anyhow::Result<()> {
    let corpus = read_corpus(&fixture("corpus.jsonl"))?;
    let mut annotations = read_annotations(&fixture("annotations.jsonl"))?;
    let modern = read_lexicon("modern".into(), &fixture("modern.jsonl"))?;
    let ghani = read_lexicon("ghani".into(), &fixture("ghani.jsonl"))?;
    let inventories = [&modern, &ghani];

    let flags = validate(&corpus, &annotations, &inventories)?;
    println!("clean fixture: {} flags", flags.len());

    // A second General sense on one occurrence of a common noun.
    let victim = annotations
        .iter_mut()
        .find(|a| a.sense_id.as_str() == "m.siyasa.2" && !a.category.is_primary())
        .expect("a Different score");
    println!(
        "setting {} at {}:{} to General",
        victim.sense_id, victim.sentence_id, victim.token_position
    );
    victim.category = ScoreCategory::General;

    let flags = validate(&corpus, &annotations, &inventories)?;
    print!("{}", flags_table(&flags));
    Ok(())
}

fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}
