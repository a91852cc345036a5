//! Start the annotation service on the fixtures and drive it over HTTP:
//! look up a word, score one sense across all its occurrences, read the flags.
//!
//!     cargo run --example annotation_server

use std::path::Path;

use serde_json::{json, Value};

use sensekit::service::{self, ServiceConfig};

fn main() -> anyhow::Result<()> {
    let data = tempfile::tempdir()?;
    let f = |n: &str| {
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("fixtures")
            .join(n)
    };
    let config = ServiceConfig {
        corpus: f("corpus.jsonl"),
        lexicons: vec![
            ("modern".into(), f("modern.jsonl")),
            ("ghani".into(), f("ghani.jsonl")),
        ],
        data_dir: data.path().to_owned(),
        listen: "127.0.0.1:0".parse()?,
        entities: Some(f("entities.jsonl")),
        lemma_table: Some(f("lemma_table.jsonl")),
        assignments: Some(f("assignments.jsonl")),
        snapshot_every: 100,
        seed: None,
    };
    let state = service::load(&config)?;

    let rt = tokio::runtime::Runtime::new()?;
    let listener = rt.block_on(tokio::net::TcpListener::bind(config.listen))?;
    let base = format!("http://{}", listener.local_addr()?);
    rt.spawn(service::run(listener, state, std::future::pending()));

    let http = reqwest::blocking::Client::new();
    let get = |path: &str| -> anyhow::Result<Value> {
        Ok(http.get(format!("{base}{path}")).send()?.json()?)
    };

    let word = "السياسة";
    println!("words: {}", get(&format!("/words?q={word}"))?);
    let contexts = get(&format!("/contexts?word={word}&annotator=a1"))?;
    let targets: Vec<Value> = contexts
        .as_array()
        .into_iter()
        .flatten()
        .flat_map(|c| {
            c["occurrences"].as_array().into_iter().flatten().map(move |o| {
                json!({"sentence_id": c["sentence_id"], "token_position": o["position"], "expected_version": o["version"]})
            })
        })
        .collect();
    println!("{} occurrences", targets.len());
    let senses = get("/lemmas/siyasa/senses")?;
    println!("modern senses: {}", senses["inventories"]["modern"]);

    let body = json!({
        "annotator_id": "a1",
        "lemma_id": "siyasa",
        "inventory_id": "modern",
        "scores": {"m.siyasa.1": 100, "m.siyasa.2": 80, "m.siyasa.3": 1},
        "targets": targets,
    });
    let receipt: Value = http
        .post(format!("{base}/annotations/bulk"))
        .header(service::ANNOTATOR_HEADER, "a1")
        .json(&body)
        .send()?
        .json()?;
    println!(
        "written {} annotations, {} flags",
        receipt["written"],
        receipt["flags"].as_array().map_or(0, Vec::len)
    );
    println!("session: {}", receipt["session"]);
    // The other inventory is still unscored here, so restrict to this one.
    println!(
        "flags: {}",
        get("/validation/flags?annotator=a1&inventory=modern")?
    );
    Ok(())
}
