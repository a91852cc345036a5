//! Crash-safety drills shared by the crash and acceptance tests.

use std::collections::BTreeMap;
use std::fs;
use std::net::TcpListener;
use std::path::Path;
use std::process::{Child, Command, Stdio};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use chrono::{TimeZone, Utc};
use serde_json::json;

use sensekit::model::{AnnotatorId, ScoreCategory, SenseId};
use sensekit::service::{AnnotationStore, BulkWrite, OccurrenceKey, StoreState, Target, LOG_FILE};

use super::{client, fixture};

const TARGETS: [(&str, usize); 3] = [("s1", 2), ("s2", 0), ("s4", 3)];

/// Category written to `m.siyasa.2` by the `n`-th request (1-based) of a writer.
fn category_of(n: u64) -> ScoreCategory {
    ScoreCategory::ALL[(n % 6) as usize]
}

fn write(annotator: &str, n: u64) -> BulkWrite {
    BulkWrite {
        annotator_id: annotator.into(),
        lemma_id: "siyasa".into(),
        inventory_id: "modern".into(),
        scores: [
            (SenseId::new("m.siyasa.1"), ScoreCategory::Explicate),
            (SenseId::new("m.siyasa.2"), category_of(n)),
        ]
        .into_iter()
        .collect(),
        targets: TARGETS
            .iter()
            .map(|(s, p)| Target {
                sentence_id: (*s).into(),
                token_position: *p,
                expected_version: None,
            })
            .collect(),
    }
}

/// Cuts the log after every byte of the final record and checks that
/// reopening yields either the state before or the state after it.
/// Returns the number of cut points checked.
pub fn truncation_drill(dir: &Path) -> Result<usize, String> {
    let at = Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap();
    let mut store = AnnotationStore::open(dir, 0).map_err(|e| e.to_string())?;
    store
        .apply_bulk(&write("a1", 1), at)
        .map_err(|e| e.to_string())?;
    let pre = store.state().clone();
    let pre_len = fs::metadata(dir.join(LOG_FILE)).unwrap().len() as usize;
    store
        .apply_bulk(&write("a1", 2), at)
        .map_err(|e| e.to_string())?;
    let post = store.state().clone();
    drop(store);
    let full = fs::read(dir.join(LOG_FILE)).unwrap();

    let mut checked = 0;
    for cut in pre_len..=full.len() {
        let case = dir.join(format!("cut-{cut}"));
        fs::create_dir_all(&case).unwrap();
        fs::write(case.join(LOG_FILE), &full[..cut]).unwrap();
        let reopened = AnnotationStore::open(&case, 0).map_err(|e| format!("cut {cut}: {e}"))?;
        let want = if cut == full.len() { &post } else { &pre };
        if reopened.state() != want {
            return Err(format!(
                "cut at byte {cut} of {} gave a mixed state",
                full.len()
            ));
        }
        // The torn tail is gone, so a following write lands on a clean line.
        let mut reopened = reopened;
        reopened
            .apply_bulk(&write("a2", 1), at)
            .map_err(|e| e.to_string())?;
        let again =
            AnnotationStore::open(&case, 0).map_err(|e| format!("cut {cut} after write: {e}"))?;
        if again.state() != reopened.state() {
            return Err(format!("cut {cut}: write after recovery was lost"));
        }
        fs::remove_dir_all(&case).unwrap();
        checked += 1;
    }
    Ok(checked)
}

fn free_port() -> u16 {
    TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port()
}

fn spawn_server(dir: &Path, port: u16) -> Child {
    Command::new(env!("CARGO_BIN_EXE_sensekit"))
        .arg("serve")
        .arg("--corpus")
        .arg(fixture("corpus.jsonl"))
        .arg("--lexicon")
        .arg(format!("modern={}", fixture("modern.jsonl").display()))
        .arg("--lexicon")
        .arg(format!("ghani={}", fixture("ghani.jsonl").display()))
        .arg("--data-dir")
        .arg(dir)
        .arg("--listen")
        .arg(format!("127.0.0.1:{port}"))
        .arg("--snapshot-every")
        .arg("7")
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .expect("spawn sensekit serve")
}

fn wait_ready(base: &str, child: &mut Child) -> Result<(), String> {
    let deadline = Instant::now() + Duration::from_secs(20);
    while Instant::now() < deadline {
        if let Ok(Some(status)) = child.try_wait() {
            return Err(format!("server exited early: {status}"));
        }
        if client().get(format!("{base}/words?q=x")).send().is_ok() {
            return Ok(());
        }
        std::thread::sleep(Duration::from_millis(25));
    }
    Err("server did not come up".into())
}

/// Runs the real binary, hammers it with bulk writes from several clients,
/// SIGKILLs it mid-stream and checks the reopened store: every acknowledged
/// request is present and no request is half applied.
/// Returns (acknowledged, recovered) request totals.
pub fn kill_drill(dir: &Path, writers: usize) -> Result<(u64, u64), String> {
    let port = free_port();
    let base = format!("http://127.0.0.1:{port}");
    let mut child = spawn_server(dir, port);
    wait_ready(&base, &mut child)?;

    let stop = Arc::new(AtomicBool::new(false));
    let handles: Vec<_> = (0..writers)
        .map(|k| {
            let stop = stop.clone();
            let url = format!("{base}/annotations/bulk");
            std::thread::spawn(move || {
                let annotator = format!("w{k}");
                let c = reqwest::blocking::Client::builder()
                    .timeout(Duration::from_secs(5))
                    .build()
                    .unwrap();
                let mut acked = 0u64;
                let mut sent = 0u64;
                while !stop.load(Ordering::Relaxed) {
                    let w = write(&annotator, sent + 1);
                    let body = json!({
                        "annotator_id": annotator,
                        "lemma_id": w.lemma_id,
                        "inventory_id": w.inventory_id,
                        "scores": w.scores,
                        "targets": w.targets,
                    });
                    sent += 1;
                    match c.post(&url).json(&body).send() {
                        Ok(r) if r.status().is_success() => acked = sent,
                        _ => break,
                    }
                }
                (AnnotatorId::new(&annotator), acked, sent)
            })
        })
        .collect();

    std::thread::sleep(Duration::from_millis(400));
    child.kill().map_err(|e| e.to_string())?;
    child.wait().map_err(|e| e.to_string())?;
    stop.store(true, Ordering::Relaxed);
    let results: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();

    let store = AnnotationStore::open(dir, 0).map_err(|e| format!("reopen: {e}"))?;
    let state = store.state();
    let (mut acked_total, mut recovered_total) = (0, 0);
    for (annotator, acked, sent) in &results {
        let n = applied_requests(state, annotator)?;
        if n < *acked {
            return Err(format!(
                "{annotator}: {acked} acknowledged but only {n} recovered"
            ));
        }
        if n > *sent {
            return Err(format!("{annotator}: {n} recovered but only {sent} sent"));
        }
        acked_total += acked;
        recovered_total += n;
    }
    if acked_total == 0 {
        return Err("no request was acknowledged before the kill".into());
    }
    Ok((acked_total, recovered_total))
}

/// How many of `annotator`'s requests the state reflects, checking that all
/// three occurrences agree (a request is all or nothing).
fn applied_requests(state: &StoreState, annotator: &AnnotatorId) -> Result<u64, String> {
    let versions: Vec<u64> = TARGETS
        .iter()
        .map(|(s, p)| {
            let token = sensekit::model::TokenRef::new((*s).into(), *p);
            state.version(&OccurrenceKey::new(&token, annotator))
        })
        .collect();
    if versions.iter().any(|v| *v != versions[0]) {
        return Err(format!(
            "{annotator}: occurrences disagree on version {versions:?}"
        ));
    }
    let n = versions[0];
    let mut cats: BTreeMap<(String, usize), ScoreCategory> = BTreeMap::new();
    for a in state.annotations() {
        if &a.annotator_id == annotator && a.sense_id.as_str() == "m.siyasa.2" {
            cats.insert((a.sentence_id.to_string(), a.token_position), a.category);
        }
    }
    if n == 0 {
        return if cats.is_empty() {
            Ok(0)
        } else {
            Err(format!("{annotator}: scores present without a version"))
        };
    }
    if cats.len() != TARGETS.len() || cats.values().any(|c| *c != category_of(n)) {
        return Err(format!("{annotator}: version {n} but scores {cats:?}"));
    }
    Ok(n)
}
