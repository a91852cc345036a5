//! Encode named-entity spans as IOB2 tags and decode them back.
//!
//!     cargo run --example iob2

use sensekit::formats::read_corpus;
use sensekit::model::{from_iob2, to_iob2, EntityMention, EntityType};

fn main() -> anyhow::Result<()> {
    let corpus = read_corpus(&fixture("corpus.jsonl"))?;
    let s3 = corpus.sentence(&"s3".into()).expect("fixture sentence");
    let mentions = vec![
        EntityMention {
            sentence_id: s3.sentence_id.clone(),
            start_position: 1,
            end_position: 1,
            entity_type: EntityType::Pers,
        },
        EntityMention {
            sentence_id: s3.sentence_id.clone(),
            start_position: 2,
            end_position: 2,
            entity_type: EntityType::Gpe,
        },
    ];

    let tags = to_iob2(s3, &mentions)?;
    for (t, tag) in s3.tokens.iter().zip(&tags) {
        println!("{:<12} {tag}", t.surface);
    }
    assert_eq!(from_iob2(&s3.sentence_id, &tags)?, mentions);
    println!("round trip ok");

    for bad in [&["I-LOC"][..], &["B-LOC", "I-ORG"], &["B-MISC"]] {
        println!("{bad:?}: {}", from_iob2(&s3.sentence_id, bad).unwrap_err());
    }
    Ok(())
}

fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}
