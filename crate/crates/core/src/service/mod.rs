//! HTTP service for the annotation workbench.
//!
//! All mutable state lives in the [`AnnotationStore`] behind one lock;
//! corpus and lexicons are loaded once at startup and never change.

pub mod store;

pub use store::{
    AnnotationStore, BulkWrite, LogRecord, OccurrenceKey, StoreError, StoreState, Target, LOG_FILE,
    SNAPSHOT_FILE,
};

use std::collections::{BTreeMap, BTreeSet};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use anyhow::Context as _;
use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::Utc;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::evaluation::{sweep, EvaluationConfig, EvaluationInputs, SweepReport};
use crate::formats;
use crate::iaa::{annotator_pairs, iaa_report, IaaReport};
use crate::model::{
    AnnotatorId, Corpus, EntityMention, InventoryId, LemmaId, ScoreCategory, SenseId,
    SenseInventory, SentenceId, TokenRef, SYSTEM_INVENTORY,
};
use crate::validation::{validate, ValidationFlag};
use crate::wsd::{
    GoldStandard, LemmaMode, LemmaTable, Lemmatizer, Markup, ScorerSpec, TsvScorer, WindowSize,
};

/// Optional header; when present it must match the request's annotator.
pub const ANNOTATOR_HEADER: &str = "x-annotator-id";

const DEFAULT_WORD_LIMIT: usize = 100;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub corpus: PathBuf,
    pub lexicons: Vec<(InventoryId, PathBuf)>,
    pub data_dir: PathBuf,
    pub listen: SocketAddr,
    pub entities: Option<PathBuf>,
    pub lemma_table: Option<PathBuf>,
    pub assignments: Option<PathBuf>,
    /// Write a snapshot after this many bulk writes; 0 disables snapshots.
    pub snapshot_every: u64,
    /// Annotations imported when the store is still empty.
    pub seed: Option<PathBuf>,
}

/// One line of the assignments file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub annotator_id: AnnotatorId,
    pub words: Vec<String>,
}

/// The read-only data a service instance works on.
#[derive(Debug, Clone, Default)]
pub struct Workbench {
    pub corpus: Corpus,
    pub inventories: Vec<SenseInventory>,
    pub mentions: Vec<EntityMention>,
    pub lemma_table: LemmaTable,
    pub assignments: BTreeMap<AnnotatorId, Vec<String>>,
}

impl Workbench {
    pub fn load(config: &ServiceConfig) -> anyhow::Result<Self> {
        let corpus = formats::read_corpus(&config.corpus)?;
        let inventories = config
            .lexicons
            .iter()
            .map(|(id, path)| formats::read_lexicon(id.clone(), path))
            .collect::<Result<Vec<_>, _>>()?;
        let mentions = match &config.entities {
            Some(p) => formats::read_entities(p)?,
            None => Vec::new(),
        };
        let lemma_table = match &config.lemma_table {
            Some(p) => formats::read_lemma_table(p)?,
            None => LemmaTable::default(),
        };
        let assignments = match &config.assignments {
            Some(p) => read_assignments(p)?,
            None => BTreeMap::new(),
        };
        Ok(Self {
            corpus,
            inventories,
            mentions,
            lemma_table,
            assignments,
        })
    }

    fn inventory(&self, id: &InventoryId) -> Option<&SenseInventory> {
        self.inventories.iter().find(|i| i.id() == id)
    }
}

pub fn read_assignments(path: &Path) -> anyhow::Result<BTreeMap<AnnotatorId, Vec<String>>> {
    let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let rows: Vec<Assignment> = formats::read_jsonl(std::io::BufReader::new(file))
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(rows
        .into_iter()
        .map(|a| (a.annotator_id, a.words))
        .collect())
}

/// Groups existing annotations into one write per (annotator, inventory,
/// lemma, occurrence), for importing into an empty store. Sentinel
/// annotations are skipped; they carry no information the service uses.
pub fn seed_writes(
    annotations: &[crate::model::ScoredSenseAnnotation],
    inventories: &[SenseInventory],
) -> anyhow::Result<Vec<(BulkWrite, chrono::DateTime<Utc>)>> {
    type Key = (AnnotatorId, InventoryId, LemmaId, TokenRef);
    let mut groups: BTreeMap<Key, (BTreeMap<SenseId, ScoreCategory>, chrono::DateTime<Utc>)> =
        BTreeMap::new();
    for a in annotations {
        if a.inventory_id.as_str() == SYSTEM_INVENTORY {
            continue;
        }
        let inv = inventories
            .iter()
            .find(|i| i.id() == &a.inventory_id)
            .with_context(|| format!("seed annotation for unknown inventory {}", a.inventory_id))?;
        let sense = inv
            .sense(&a.sense_id)
            .with_context(|| format!("seed annotation for unknown sense {}", a.sense_id))?;
        let key = (
            a.annotator_id.clone(),
            a.inventory_id.clone(),
            sense.lemma_id.clone(),
            a.token(),
        );
        let entry = groups
            .entry(key)
            .or_insert_with(|| (BTreeMap::new(), a.timestamp));
        entry.0.insert(a.sense_id.clone(), a.category);
        entry.1 = entry.1.max(a.timestamp);
    }
    Ok(groups
        .into_iter()
        .map(
            |((annotator_id, inventory_id, lemma_id, token), (scores, at))| {
                let write = BulkWrite {
                    annotator_id,
                    lemma_id,
                    inventory_id,
                    scores,
                    targets: vec![Target {
                        sentence_id: token.sentence_id,
                        token_position: token.token_position,
                        expected_version: None,
                    }],
                };
                (write, at)
            },
        )
        .collect())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum JobStatus {
    Running,
    Done { result: SweepReport },
    Failed { error: String },
}

pub struct AppState {
    bench: Workbench,
    /// Non-sentinel surface form -> occurrences in corpus order.
    surfaces: BTreeMap<String, Vec<TokenRef>>,
    store: RwLock<AnnotationStore>,
    jobs: Mutex<BTreeMap<u64, JobStatus>>,
    next_job: AtomicU64,
}

impl AppState {
    pub fn new(bench: Workbench, store: AnnotationStore) -> Arc<Self> {
        let mut surfaces: BTreeMap<String, Vec<TokenRef>> = BTreeMap::new();
        for (s, t) in bench.corpus.occurrences() {
            if !t.token_class.is_sentinel() {
                surfaces
                    .entry(t.surface.clone())
                    .or_default()
                    .push(TokenRef::new(s.sentence_id.clone(), t.position));
            }
        }
        Arc::new(Self {
            bench,
            surfaces,
            store: RwLock::new(store),
            jobs: Mutex::new(BTreeMap::new()),
            next_job: AtomicU64::new(1),
        })
    }

    pub fn bench(&self) -> &Workbench {
        &self.bench
    }

    /// A copy of the current store state.
    pub fn store_state(&self) -> StoreState {
        self.store.read().expect("store lock").state().clone()
    }

    fn session(&self, annotator: &AnnotatorId, state: &StoreState) -> Option<AnnotationSession> {
        let words = self.bench.assignments.get(annotator)?;
        let mut completed = 0;
        let mut done_occ = 0;
        let mut total_occ = 0;
        for w in words {
            let occ = self.surfaces.get(w).map(Vec::as_slice).unwrap_or(&[]);
            let done = occ
                .iter()
                .filter(|r| state.touched(&OccurrenceKey::new(r, annotator)))
                .count();
            total_occ += occ.len();
            done_occ += done;
            if done == occ.len() {
                completed += 1;
            }
        }
        Some(AnnotationSession {
            annotator_id: annotator.clone(),
            assigned: words.clone(),
            completed_words: completed,
            annotated_occurrences: done_occ,
            total_occurrences: total_occ,
        })
    }
}

/// Progress of one annotator through their static word assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationSession {
    pub annotator_id: AnnotatorId,
    pub assigned: Vec<String>,
    /// Assigned words whose every occurrence has been scored.
    pub completed_words: usize,
    pub annotated_occurrences: usize,
    pub total_occurrences: usize,
}

#[derive(Debug)]
pub enum ApiError {
    BadRequest(String),
    Forbidden(String),
    NotFound(String),
    Conflict(String),
    Internal(String),
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, code, message) = match self {
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, "bad_request", m),
            ApiError::Forbidden(m) => (StatusCode::FORBIDDEN, "forbidden", m),
            ApiError::NotFound(m) => (StatusCode::NOT_FOUND, "not_found", m),
            ApiError::Conflict(m) => (StatusCode::CONFLICT, "conflict", m),
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, "internal", m),
        };
        let body = ErrorBody {
            error: code.to_owned(),
            message,
        };
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn parse_body<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::BadRequest(e.to_string()))
}

/// Drops Arabic short vowels, shadda, sukun, dagger alif and tatweel so that
/// vocalized citation forms match unvocalized queries.
pub fn fold_diacritics(s: &str) -> String {
    s.chars()
        .filter(|c| !matches!(*c, '\u{064B}'..='\u{065F}' | '\u{0670}' | '\u{0640}'))
        .collect()
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/words", get(find_words))
        .route("/contexts", get(contexts))
        .route("/lemmas/suggest", get(lemma_suggest))
        .route("/lemmas/search", get(lemma_search))
        .route("/lemmas/{id}/senses", get(senses))
        .route("/annotations/bulk", post(apply_scores))
        .route("/validation/flags", get(validation_flags))
        .route("/iaa/report", get(iaa))
        .route("/wsd/evaluate", post(wsd_evaluate))
        .route("/jobs/{id}", get(job))
        .with_state(state)
}

/// Loads corpus, lexicons and store, importing the seed file into an empty store.
pub fn load(config: &ServiceConfig) -> anyhow::Result<Arc<AppState>> {
    let bench = Workbench::load(config)?;
    let mut store = AnnotationStore::open(&config.data_dir, config.snapshot_every)?;
    if let Some(path) = &config.seed {
        if store.state().seq == 0 {
            let annotations = formats::read_annotations(path)?;
            let writes = seed_writes(&annotations, &bench.inventories)?;
            tracing::info!(records = writes.len(), "importing seed annotations");
            for (write, at) in &writes {
                store.apply_bulk(write, *at)?;
            }
        }
    }
    Ok(AppState::new(bench, store))
}

/// Serves `state` on `listener` until `shutdown` resolves.
pub async fn run(
    listener: tokio::net::TcpListener,
    state: Arc<AppState>,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await
}

/// Loads everything named in `config` and runs until Ctrl-C.
pub async fn serve(config: ServiceConfig) -> anyhow::Result<()> {
    let state = load(&config)?;
    let listener = tokio::net::TcpListener::bind(config.listen)
        .await
        .with_context(|| format!("binding {}", config.listen))?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    run(listener, state, async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await?;
    Ok(())
}

#[derive(Debug, Deserialize)]
struct WordsQuery {
    #[serde(default)]
    q: String,
    limit: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordCount {
    pub word: String,
    pub count: usize,
}

/// Surface forms containing the query; the exact match first, then by
/// frequency, then alphabetically.
async fn find_words(
    State(st): State<Arc<AppState>>,
    Query(q): Query<WordsQuery>,
) -> ApiResult<Vec<WordCount>> {
    let query = q.q.trim();
    if query.is_empty() {
        return Err(ApiError::BadRequest("query must not be empty".into()));
    }
    let folded = fold_diacritics(query);
    let mut out: Vec<WordCount> = st
        .surfaces
        .iter()
        .filter(|(w, _)| w.as_str() == query || fold_diacritics(w).contains(&folded))
        .map(|(w, occ)| WordCount {
            word: w.clone(),
            count: occ.len(),
        })
        .collect();
    out.sort_by(|a, b| {
        (b.word == query)
            .cmp(&(a.word == query))
            .then(b.count.cmp(&a.count))
            .then(a.word.cmp(&b.word))
    });
    out.truncate(q.limit.unwrap_or(DEFAULT_WORD_LIMIT));
    Ok(Json(out))
}

#[derive(Debug, Deserialize)]
struct ContextsQuery {
    #[serde(default)]
    word: String,
    annotator: Option<AnnotatorId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccurrenceView {
    pub position: usize,
    /// Version to send back as `expected_version`; 0 when no annotator is given.
    pub version: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemma_id: Option<LemmaId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextView {
    pub sentence_id: SentenceId,
    pub tokens: Vec<String>,
    pub occurrences: Vec<OccurrenceView>,
}

async fn contexts(
    State(st): State<Arc<AppState>>,
    Query(q): Query<ContextsQuery>,
) -> ApiResult<Vec<ContextView>> {
    let Some(occ) = st.surfaces.get(q.word.trim()) else {
        return Ok(Json(Vec::new()));
    };
    let state = st.store.read().expect("store lock");
    let mut out: Vec<ContextView> = Vec::new();
    for r in occ {
        let (version, lemma_id) = match &q.annotator {
            Some(a) => {
                let key = OccurrenceKey::new(r, a);
                (
                    state.state().version(&key),
                    state.state().lemma(&key).cloned(),
                )
            }
            None => (0, None),
        };
        let view = OccurrenceView {
            position: r.token_position,
            version,
            lemma_id,
        };
        match out.last_mut() {
            Some(c) if c.sentence_id == r.sentence_id => c.occurrences.push(view),
            _ => {
                let sentence = st
                    .bench
                    .corpus
                    .sentence(&r.sentence_id)
                    .expect("indexed sentence");
                out.push(ContextView {
                    sentence_id: r.sentence_id.clone(),
                    tokens: sentence.surfaces().map(str::to_owned).collect(),
                    occurrences: vec![view],
                });
            }
        }
    }
    Ok(Json(out))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaInfo {
    pub lemma_id: LemmaId,
    pub citation_form: String,
    pub pos: String,
    pub inventories: Vec<InventoryId>,
}

fn lemma_info(bench: &Workbench, id: &LemmaId) -> Option<LemmaInfo> {
    let mut info: Option<LemmaInfo> = None;
    for inv in &bench.inventories {
        if let Some(l) = inv.lemma(id) {
            let entry = info.get_or_insert_with(|| LemmaInfo {
                lemma_id: id.clone(),
                citation_form: l.citation_form.clone(),
                pos: l.pos.clone(),
                inventories: Vec::new(),
            });
            entry.inventories.push(inv.id().clone());
        }
    }
    info
}

#[derive(Debug, Deserialize)]
struct SuggestQuery {
    #[serde(default)]
    word: String,
}

/// Gold lemmas of the word's occurrences by frequency, then the lookup table.
async fn lemma_suggest(
    State(st): State<Arc<AppState>>,
    Query(q): Query<SuggestQuery>,
) -> ApiResult<Vec<LemmaInfo>> {
    let word = q.word.trim();
    let mut counts: BTreeMap<&LemmaId, usize> = BTreeMap::new();
    for r in st.surfaces.get(word).map(Vec::as_slice).unwrap_or(&[]) {
        if let Some(l) = st
            .bench
            .corpus
            .token(r)
            .and_then(|t| t.gold_lemma_id.as_ref())
        {
            *counts.entry(l).or_default() += 1;
        }
    }
    let mut ranked: Vec<(&LemmaId, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let mut ids: Vec<LemmaId> = ranked.into_iter().map(|(l, _)| l.clone()).collect();
    if let Some(l) = st.bench.lemma_table.lemmatize(word) {
        if !ids.contains(&l) {
            ids.push(l);
        }
    }
    Ok(Json(
        ids.iter()
            .filter_map(|id| lemma_info(&st.bench, id))
            .collect(),
    ))
}

#[derive(Debug, Deserialize)]
struct SearchQuery {
    #[serde(default)]
    q: String,
}

/// Substring match over citation forms, ignoring diacritics.
async fn lemma_search(
    State(st): State<Arc<AppState>>,
    Query(q): Query<SearchQuery>,
) -> ApiResult<Vec<LemmaInfo>> {
    let needle = fold_diacritics(q.q.trim());
    if needle.is_empty() {
        return Ok(Json(Vec::new()));
    }
    let ids: BTreeSet<&LemmaId> = st
        .bench
        .inventories
        .iter()
        .flat_map(|inv| inv.lemmas())
        .filter(|l| fold_diacritics(&l.citation_form).contains(&needle))
        .map(|l| &l.lemma_id)
        .collect();
    Ok(Json(
        ids.into_iter()
            .filter_map(|id| lemma_info(&st.bench, id))
            .collect(),
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SenseView {
    pub sense_id: SenseId,
    pub gloss: String,
    pub rank_in_lemma: usize,
    pub is_proper_noun: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaSenses {
    pub lemma_id: LemmaId,
    /// Every loaded inventory; empty where the lemma is not listed.
    pub inventories: BTreeMap<InventoryId, Vec<SenseView>>,
}

async fn senses(
    State(st): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
) -> ApiResult<LemmaSenses> {
    let lemma_id = LemmaId::new(id);
    let mut found = false;
    let mut inventories = BTreeMap::new();
    for inv in &st.bench.inventories {
        found |= inv.contains_lemma(&lemma_id);
        let list = inv
            .senses_of(&lemma_id)
            .into_iter()
            .map(|s| SenseView {
                sense_id: s.sense_id.clone(),
                gloss: s.gloss.clone(),
                rank_in_lemma: s.rank_in_lemma,
                is_proper_noun: s.is_proper_noun,
            })
            .collect();
        inventories.insert(inv.id().clone(), list);
    }
    if !found {
        return Err(ApiError::NotFound(format!("unknown lemma {lemma_id}")));
    }
    Ok(Json(LemmaSenses {
        lemma_id,
        inventories,
    }))
}

/// Scores for some senses of one lemma, applied to every target occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BulkScoreRequest {
    pub annotator_id: AnnotatorId,
    pub lemma_id: LemmaId,
    pub inventory_id: InventoryId,
    pub scores: BTreeMap<SenseId, ScoreCategory>,
    pub targets: Vec<Target>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetVersion {
    pub sentence_id: SentenceId,
    pub token_position: usize,
    pub version: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WriteReceipt {
    pub seq: u64,
    pub written: usize,
    pub versions: Vec<TargetVersion>,
    pub superseded: Vec<TokenRef>,
    /// Advisory flags for the affected occurrences in this inventory.
    pub flags: Vec<ValidationFlag>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub session: Option<AnnotationSession>,
}

impl AppState {
    fn check_bulk(&self, req: &BulkScoreRequest) -> Result<(), ApiError> {
        let bad = |m: String| Err(ApiError::BadRequest(m));
        if req.annotator_id.as_str().is_empty() {
            return bad("annotator_id must not be empty".into());
        }
        if req.inventory_id.as_str() == SYSTEM_INVENTORY {
            return bad("the system inventory is not annotated by hand".into());
        }
        let Some(inv) = self.bench.inventory(&req.inventory_id) else {
            return bad(format!("unknown inventory {}", req.inventory_id));
        };
        if !inv.contains_lemma(&req.lemma_id) {
            return bad(format!(
                "lemma {} is not in {}",
                req.lemma_id, req.inventory_id
            ));
        }
        if req.scores.is_empty() {
            return bad("scores must not be empty".into());
        }
        for sense in req.scores.keys() {
            match inv.sense(sense) {
                Some(s) if s.lemma_id == req.lemma_id => {}
                _ => {
                    return bad(format!(
                        "sense {sense} does not belong to lemma {} in {}",
                        req.lemma_id, req.inventory_id
                    ))
                }
            }
        }
        if req.targets.is_empty() {
            return bad("targets must not be empty".into());
        }
        for t in &req.targets {
            match self.bench.corpus.token(&t.token()) {
                None => return bad(format!("no token at {}", t.token())),
                Some(tok) if tok.token_class.is_sentinel() => {
                    return bad(format!(
                        "{} is a {} token",
                        t.token(),
                        tok.token_class.as_str()
                    ))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    pub fn apply_bulk(
        &self,
        headers: &HeaderMap,
        req: BulkScoreRequest,
    ) -> Result<WriteReceipt, ApiError> {
        if let Some(h) = headers.get(ANNOTATOR_HEADER) {
            if h.as_bytes() != req.annotator_id.as_str().as_bytes() {
                return Err(ApiError::Forbidden(format!(
                    "{ANNOTATOR_HEADER} does not match annotator_id {}",
                    req.annotator_id
                )));
            }
        }
        self.check_bulk(&req)?;
        let write = BulkWrite {
            annotator_id: req.annotator_id,
            lemma_id: req.lemma_id,
            inventory_id: req.inventory_id,
            scores: req.scores,
            targets: req.targets,
        };

        let mut store = self.store.write().expect("store lock");
        let record = store.apply_bulk(&write, Utc::now()).map_err(|e| match e {
            StoreError::Conflict { .. } => ApiError::Conflict(e.to_string()),
            other => ApiError::Internal(other.to_string()),
        })?;
        let state = store.state().clone();
        drop(store);

        let affected: BTreeSet<TokenRef> = record.occurrences.iter().cloned().collect();
        let mine: Vec<_> = state
            .annotations_at(&write.annotator_id, &affected)
            .into_iter()
            .filter(|a| a.inventory_id == write.inventory_id)
            .collect();
        let inv = self
            .bench
            .inventory(&write.inventory_id)
            .expect("checked above");
        let flags = validate(&self.bench.corpus, &mine, &[inv])
            .map_err(|e| ApiError::Internal(e.to_string()))?;
        let versions = record
            .occurrences
            .iter()
            .map(|r| TargetVersion {
                sentence_id: r.sentence_id.clone(),
                token_position: r.token_position,
                version: state.version(&OccurrenceKey::new(r, &write.annotator_id)),
            })
            .collect();
        Ok(WriteReceipt {
            seq: record.seq,
            written: record.annotations.len(),
            versions,
            superseded: record.superseded,
            flags,
            session: self.session(&write.annotator_id, &state),
        })
    }
}

async fn apply_scores(
    State(st): State<Arc<AppState>>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<WriteReceipt> {
    let req: BulkScoreRequest = parse_body(&body)?;
    // The write fsyncs; keep it off the async workers.
    tokio::task::spawn_blocking(move || st.apply_bulk(&headers, req))
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))?
        .map(Json)
}

#[derive(Debug, Deserialize)]
struct FlagsQuery {
    annotator: Option<AnnotatorId>,
    inventory: Option<InventoryId>,
    sentence_id: Option<SentenceId>,
    rule: Option<String>,
}

async fn validation_flags(
    State(st): State<Arc<AppState>>,
    Query(q): Query<FlagsQuery>,
) -> ApiResult<Vec<ValidationFlag>> {
    let annotations = st.store.read().expect("store lock").annotations();
    let refs: Vec<&SenseInventory> = st.bench.inventories.iter().collect();
    let flags = validate(&st.bench.corpus, &annotations, &refs)
        .map_err(|e| ApiError::Internal(e.to_string()))?;
    Ok(Json(
        flags
            .into_iter()
            .filter(|f| q.annotator.as_ref().is_none_or(|a| &f.annotator_id == a))
            .filter(|f| q.inventory.as_ref().is_none_or(|i| &f.inventory_id == i))
            .filter(|f| q.sentence_id.as_ref().is_none_or(|s| &f.sentence_id == s))
            .filter(|f| q.rule.as_deref().is_none_or(|r| f.rule.to_string() == r))
            .collect(),
    ))
}

#[derive(Debug, Deserialize)]
struct IaaQuery {
    pair: Option<String>,
    inventory: Option<InventoryId>,
}

async fn iaa(State(st): State<Arc<AppState>>, Query(q): Query<IaaQuery>) -> ApiResult<IaaReport> {
    let annotations = st.store.read().expect("store lock").annotations();
    let pairs = match q.pair.as_deref() {
        Some(p) => {
            let (a, b) = p
                .split_once(',')
                .ok_or_else(|| ApiError::BadRequest(format!("pair must be A,B, got {p:?}")))?;
            vec![(AnnotatorId::new(a.trim()), AnnotatorId::new(b.trim()))]
        }
        None => annotator_pairs(&annotations),
    };
    let inventories = match q.inventory {
        Some(i) if st.bench.inventory(&i).is_some() => vec![i],
        Some(i) => return Err(ApiError::BadRequest(format!("unknown inventory {i}"))),
        None => st
            .bench
            .inventories
            .iter()
            .map(|i| i.id().clone())
            .collect(),
    };
    iaa_report(&annotations, &pairs, &inventories)
        .map(Json)
        .map_err(|e| ApiError::BadRequest(e.to_string()))
}

fn default_windows() -> Vec<WindowSize> {
    vec![WindowSize::Tokens(11)]
}

fn default_threshold() -> ScoreCategory {
    ScoreCategory::Referral
}

fn yes() -> bool {
    true
}

/// Body of `POST /wsd/evaluate`. Gold is the store content at submission.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluateRequest {
    pub scorer: ScorerSpec,
    /// Empty means every loaded inventory.
    #[serde(default)]
    pub inventories: Vec<InventoryId>,
    #[serde(default = "default_windows")]
    pub windows: Vec<WindowSize>,
    #[serde(default)]
    pub markup: Markup,
    #[serde(default)]
    pub lemma_mode: LemmaMode,
    #[serde(default = "default_threshold")]
    pub correctness_threshold: ScoreCategory,
    #[serde(default)]
    pub include_function_words: bool,
    #[serde(default = "yes")]
    pub skip_unannotated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobAccepted {
    pub job_id: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JobView {
    pub job_id: u64,
    #[serde(flatten)]
    pub status: JobStatus,
}

impl AppState {
    fn run_evaluation(&self, req: &EvaluateRequest, gold: GoldStandard) -> SweepReport {
        let inventories: Vec<&SenseInventory> = if req.inventories.is_empty() {
            self.bench.inventories.iter().collect()
        } else {
            req.inventories
                .iter()
                .filter_map(|id| self.bench.inventory(id))
                .collect()
        };
        let gold = Arc::new(gold);
        let scorer = req.scorer.build(gold.clone(), req.correctness_threshold);
        let scorers: [&dyn TsvScorer; 1] = [scorer.as_ref()];
        let base = EvaluationConfig {
            markup: req.markup,
            lemma_mode: req.lemma_mode,
            correctness_threshold: req.correctness_threshold,
            include_function_words: req.include_function_words,
            skip_unannotated: req.skip_unannotated,
            ..EvaluationConfig::new(InventoryId::new(""), req.windows[0])
        };
        let inputs = EvaluationInputs {
            corpus: &self.bench.corpus,
            gold: &gold,
            mentions: &self.bench.mentions,
            lemmatizer: Some(&self.bench.lemma_table as &dyn Lemmatizer),
        };
        sweep(inputs, &inventories, &scorers, &req.windows, &base)
    }
}

async fn wsd_evaluate(
    State(st): State<Arc<AppState>>,
    body: Bytes,
) -> Result<(StatusCode, Json<JobAccepted>), ApiError> {
    let req: EvaluateRequest = parse_body(&body)?;
    if req.windows.is_empty() {
        return Err(ApiError::BadRequest("windows must not be empty".into()));
    }
    for id in &req.inventories {
        if st.bench.inventory(id).is_none() {
            return Err(ApiError::BadRequest(format!("unknown inventory {id}")));
        }
    }
    let gold = GoldStandard::from_annotations(&st.store.read().expect("store lock").annotations());
    let job_id = st.next_job.fetch_add(1, Ordering::SeqCst);
    st.jobs
        .lock()
        .expect("jobs lock")
        .insert(job_id, JobStatus::Running);

    let worker = st.clone();
    let handle = tokio::task::spawn_blocking(move || worker.run_evaluation(&req, gold));
    tokio::spawn(async move {
        let status = match handle.await {
            Ok(result) => JobStatus::Done { result },
            Err(e) => JobStatus::Failed {
                error: e.to_string(),
            },
        };
        st.jobs.lock().expect("jobs lock").insert(job_id, status);
    });
    Ok((StatusCode::ACCEPTED, Json(JobAccepted { job_id })))
}

async fn job(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<u64>) -> ApiResult<JobView> {
    let jobs = st.jobs.lock().expect("jobs lock");
    let status = jobs
        .get(&id)
        .cloned()
        .ok_or_else(|| ApiError::NotFound(format!("unknown job {id}")))?;
    Ok(Json(JobView { job_id: id, status }))
}
