#![allow(dead_code)]

pub mod crash;

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::thread::JoinHandle;

use sensekit::service::{self, AppState, ServiceConfig};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn config(data_dir: &Path, seed: bool) -> ServiceConfig {
    ServiceConfig {
        corpus: fixture("corpus.jsonl"),
        lexicons: vec![
            ("modern".into(), fixture("modern.jsonl")),
            ("ghani".into(), fixture("ghani.jsonl")),
        ],
        data_dir: data_dir.to_owned(),
        listen: "127.0.0.1:0".parse().unwrap(),
        entities: Some(fixture("entities.jsonl")),
        lemma_table: Some(fixture("lemma_table.jsonl")),
        assignments: Some(fixture("assignments.jsonl")),
        snapshot_every: 3,
        seed: seed.then(|| fixture("annotations.jsonl")),
    }
}

/// A service on an ephemeral port, running on its own runtime thread.
pub struct TestServer {
    pub base: String,
    pub state: Arc<AppState>,
    stop: Option<tokio::sync::oneshot::Sender<()>>,
    thread: Option<JoinHandle<()>>,
}

impl TestServer {
    pub fn start(state: Arc<AppState>) -> Self {
        let (addr_tx, addr_rx) = std::sync::mpsc::channel();
        let (stop_tx, stop_rx) = tokio::sync::oneshot::channel::<()>();
        let served = state.clone();
        let thread = std::thread::spawn(move || {
            let rt = tokio::runtime::Runtime::new().unwrap();
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
                addr_tx.send(listener.local_addr().unwrap()).unwrap();
                service::run(listener, served, async {
                    let _ = stop_rx.await;
                })
                .await
                .unwrap();
            });
        });
        let addr = addr_rx.recv().unwrap();
        Self {
            base: format!("http://{addr}"),
            state,
            stop: Some(stop_tx),
            thread: Some(thread),
        }
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{}", self.base, path)
    }
}

impl Drop for TestServer {
    fn drop(&mut self) {
        if let Some(tx) = self.stop.take() {
            let _ = tx.send(());
        }
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

pub fn client() -> reqwest::blocking::Client {
    reqwest::blocking::Client::new()
}
