mod common;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use axum::extract::State;
use axum::http::StatusCode;
use axum::routing::post;
use axum::{Json, Router};
use serde_json::Value;

use sensekit::evaluation::{sweep, EvaluationConfig, EvaluationInputs};
use sensekit::formats::read_annotations;
use sensekit::model::InventoryId;
use sensekit::service::Workbench;
use sensekit::wsd::{
    Confidence, ContextGlossPair, GoldStandard, Lemmatizer, RemoteScorer, RemoteScorerConfig,
    ScorerError, TsvScorer, WindowSize, WireRequest, WireResponse,
};

/// Deterministic toy scoring shared by the stub and the local twin.
fn toy(context: &str, gloss: &str) -> WireResponse {
    let h = context.chars().count() * 31
        + gloss.chars().count() * 7
        + gloss.chars().map(|c| c as usize).sum::<usize>();
    let p = (h % 101) as f64 / 100.0;
    WireResponse {
        true_confidence: p,
        false_confidence: 1.0 - p,
    }
}

struct Local;

impl TsvScorer for Local {
    fn name(&self) -> String {
        "local".into()
    }
    fn score(&self, pairs: &[ContextGlossPair]) -> Result<Vec<Confidence>, ScorerError> {
        Ok(pairs
            .iter()
            .map(|p| {
                let r = toy(&p.context, &p.gloss);
                Confidence::new(r.true_confidence, r.false_confidence)
            })
            .collect())
    }
}

#[derive(Default)]
struct Hits {
    requests: AtomicUsize,
    batched: AtomicUsize,
}

async fn good(State(hits): State<Arc<Hits>>, Json(body): Json<Value>) -> Json<Value> {
    hits.requests.fetch_add(1, Ordering::SeqCst);
    if body.is_array() {
        hits.batched.fetch_add(1, Ordering::SeqCst);
        let reqs: Vec<WireRequest> = serde_json::from_value(body).unwrap();
        Json(
            serde_json::to_value(
                reqs.iter()
                    .map(|r| toy(&r.context, &r.gloss))
                    .collect::<Vec<_>>(),
            )
            .unwrap(),
        )
    } else {
        let r: WireRequest = serde_json::from_value(body).unwrap();
        Json(serde_json::to_value(toy(&r.context, &r.gloss)).unwrap())
    }
}

async fn short(Json(body): Json<Value>) -> Json<Value> {
    let reqs: Vec<WireRequest> = serde_json::from_value(body).unwrap_or_default();
    let out: Vec<WireResponse> = reqs
        .iter()
        .skip(1)
        .map(|r| toy(&r.context, &r.gloss))
        .collect();
    Json(serde_json::to_value(out).unwrap())
}

async fn broken() -> StatusCode {
    StatusCode::SERVICE_UNAVAILABLE
}

async fn garbage() -> &'static str {
    "{\"yes\": 1}"
}

struct Stub {
    base: String,
    hits: Arc<Hits>,
    _rt: tokio::runtime::Runtime,
}

fn stub() -> Stub {
    let rt = tokio::runtime::Runtime::new().unwrap();
    let hits = Arc::new(Hits::default());
    let app = Router::new()
        .route("/good", post(good))
        .route("/short", post(short))
        .route("/broken", post(broken))
        .route("/garbage", post(garbage))
        .with_state(hits.clone());
    let listener = rt
        .block_on(tokio::net::TcpListener::bind("127.0.0.1:0"))
        .unwrap();
    let addr = listener.local_addr().unwrap();
    rt.spawn(async move { axum::serve(listener, app).await.unwrap() });
    Stub {
        base: format!("http://{addr}"),
        hits,
        _rt: rt,
    }
}

fn remote(url: String, batch: usize) -> RemoteScorer {
    RemoteScorer::new(RemoteScorerConfig {
        batch_size: batch,
        name: Some("stub".into()),
        ..RemoteScorerConfig::new(url)
    })
}

fn fixture_sweep(scorer: &dyn TsvScorer) -> Vec<(String, Option<f64>, Option<String>)> {
    let dir = tempfile::tempdir().unwrap();
    let bench = Workbench::load(&common::config(dir.path(), false)).unwrap();
    let gold = GoldStandard::from_annotations(
        &read_annotations(&common::fixture("annotations.jsonl")).unwrap(),
    );
    let inputs = EvaluationInputs {
        corpus: &bench.corpus,
        gold: &gold,
        mentions: &bench.mentions,
        lemmatizer: Some(&bench.lemma_table as &dyn Lemmatizer),
    };
    let invs: Vec<_> = bench.inventories.iter().collect();
    let base = EvaluationConfig::new(InventoryId::new("modern"), WindowSize::Tokens(11));
    sweep(inputs, &invs, &[scorer], &WindowSize::SIZES, &base)
        .cells
        .into_iter()
        .map(|c| {
            (
                format!("{}/{}", c.inventory_id, c.window),
                c.report.and_then(|r| r.top1),
                c.error,
            )
        })
        .collect()
}

#[test]
fn remote_matches_local_in_batch_and_single_mode() {
    let s = stub();
    let want = fixture_sweep(&Local);
    assert!(want.iter().all(|c| c.2.is_none()));

    let batch = fixture_sweep(&remote(format!("{}/good", s.base), 4));
    assert_eq!(batch, want);
    let batched = s.hits.batched.load(Ordering::SeqCst);
    assert!(batched > 0);

    let before = s.hits.requests.load(Ordering::SeqCst);
    let single = fixture_sweep(&remote(format!("{}/good", s.base), 1));
    assert_eq!(single, want);
    assert_eq!(s.hits.batched.load(Ordering::SeqCst), batched);
    assert!(s.hits.requests.load(Ordering::SeqCst) > before);
}

#[test]
fn failures_are_typed() {
    let s = stub();
    let pair = ContextGlossPair {
        token: sensekit::model::TokenRef::new("s1".into(), 2),
        inventory_id: "modern".into(),
        sense_id: "m.siyasa.1".into(),
        rank_in_lemma: 0,
        markup: Default::default(),
        context: "x".into(),
        gloss: "y".into(),
    };
    let pairs = vec![pair.clone(), pair];
    let err = remote(format!("{}/broken", s.base), 4)
        .score(&pairs)
        .unwrap_err();
    assert!(matches!(err, ScorerError::Unavailable(_)), "{err:?}");
    let err = remote(format!("{}/short", s.base), 4)
        .score(&pairs)
        .unwrap_err();
    assert!(matches!(err, ScorerError::Protocol(_)), "{err:?}");
    let err = remote(format!("{}/garbage", s.base), 1)
        .score(&pairs)
        .unwrap_err();
    assert!(matches!(err, ScorerError::Protocol(_)), "{err:?}");

    // A failing endpoint becomes an error cell, not an aborted sweep.
    let cells = fixture_sweep(&remote(format!("{}/broken", s.base), 4));
    assert_eq!(cells.len(), 12);
    assert!(cells.iter().all(|c| c.1.is_none() && c.2.is_some()));
}
