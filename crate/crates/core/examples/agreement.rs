//! Inter-annotator agreement on a synthetic corpus with noisy second annotators.
//!
//!     cargo run --example agreement -- [NOISE]

use sensekit::iaa::{annotator_pairs, iaa_report};
use sensekit::render::iaa_table;
use sensekit::synthetic::{generate, SyntheticSpec};

fn main() -> anyhow::Result<()> {
    let noise = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0.15);
    let s = generate(&SyntheticSpec {
        sentences: 120,
        double_annotation: 0.4,
        noise,
        ..SyntheticSpec::default()
    });
    let pairs = annotator_pairs(&s.annotations);
    let inventories: Vec<_> = s.inventories.iter().map(|i| i.id().clone()).collect();
    let report = iaa_report(&s.annotations, &pairs, &inventories)?;
    println!("noise {noise}, {} annotator pairs", pairs.len());
    print!("{}", iaa_table(&report));
    Ok(())
}
