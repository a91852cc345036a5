//! A toy scoring endpoint speaking the remote wire protocol, and the
//! client-side scorer that talks to it.
//!
//!     cargo run --example remote_scorer           # self-contained demo
//!     cargo run --example remote_scorer -- serve  # only the endpoint, on 127.0.0.1:9100

use axum::routing::post;
use axum::{Json, Router};
use serde_json::Value;

use sensekit::formats::{read_corpus, read_lexicon};
use sensekit::wsd::{
    disambiguate, PipelineConfig, RemoteScorer, RemoteScorerConfig, WireRequest, WireResponse,
};

/// Fraction of gloss characters that also occur in the context.
fn overlap(r: &WireRequest) -> WireResponse {
    let total = r
        .gloss
        .chars()
        .filter(|c| !c.is_whitespace())
        .count()
        .max(1);
    let shared = r
        .gloss
        .chars()
        .filter(|c| !c.is_whitespace() && r.context.contains(*c))
        .count();
    let p = shared as f64 / total as f64;
    WireResponse {
        true_confidence: p,
        false_confidence: 1.0 - p,
    }
}

async fn score(Json(body): Json<Value>) -> Json<Value> {
    let out = match body {
        Value::Array(items) => {
            let reqs: Vec<WireRequest> = items
                .into_iter()
                .filter_map(|v| serde_json::from_value(v).ok())
                .collect();
            serde_json::to_value(reqs.iter().map(overlap).collect::<Vec<_>>())
        }
        one => serde_json::to_value(
            serde_json::from_value::<WireRequest>(one)
                .map(|r| overlap(&r))
                .ok(),
        ),
    };
    Json(out.unwrap_or(Value::Null))
}

fn main() -> anyhow::Result<()> {
    let rt = tokio::runtime::Runtime::new()?;
    let app = Router::new().route("/score", post(score));
    if std::env::args().nth(1).as_deref() == Some("serve") {
        return rt.block_on(async {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:9100").await?;
            println!("scoring on http://{}/score", listener.local_addr()?);
            axum::serve(listener, app).await?;
            Ok(())
        });
    }

    let listener = rt.block_on(tokio::net::TcpListener::bind("127.0.0.1:0"))?;
    let url = format!("http://{}/score", listener.local_addr()?);
    rt.spawn(async move { axum::serve(listener, app).await });

    let corpus = read_corpus(&fixture("corpus.jsonl"))?;
    let modern = read_lexicon("modern".into(), &fixture("modern.jsonl"))?;
    let scorer = RemoteScorer::new(RemoteScorerConfig::new(url.clone()));
    let config = PipelineConfig::default();
    for sentence in corpus.sentences() {
        for t in sentence
            .tokens
            .iter()
            .filter(|t| !t.token_class.is_sentinel())
        {
            match disambiguate(sentence, t.position, &modern, &scorer, &config, None) {
                Ok(ranked) => println!(
                    "{} {:<12} -> {}",
                    sentence.sentence_id, t.surface, ranked[0]
                ),
                Err(e) => println!("{} {:<12} -> {e}", sentence.sentence_id, t.surface),
            }
        }
    }
    println!("scored via {url}");
    Ok(())
}

fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}
