//! HTTP client for externally hosted scorers.
//!
//! Wire protocol: `POST <endpoint>` with a JSON body `{"context": .., "gloss": ..}`
//! answered by `{"true": p, "false": q}`. A JSON array of requests is the
//! batch form and is answered by an order-aligned array of responses.

use std::sync::{Condvar, Mutex, OnceLock};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{Confidence, ContextGlossPair, ScorerError, TsvScorer};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireRequest {
    pub context: String,
    pub gloss: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WireResponse {
    #[serde(rename = "true")]
    pub true_confidence: f64,
    #[serde(rename = "false")]
    pub false_confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemoteScorerConfig {
    pub endpoint: String,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
    /// Pairs per request; 1 sends single objects instead of arrays.
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default = "default_max_in_flight")]
    pub max_in_flight: usize,
    /// Label used in reports.
    #[serde(default)]
    pub name: Option<String>,
}

fn default_timeout_ms() -> u64 {
    30_000
}

fn default_batch_size() -> usize {
    16
}

fn default_max_in_flight() -> usize {
    4
}

impl RemoteScorerConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            timeout_ms: default_timeout_ms(),
            batch_size: default_batch_size(),
            max_in_flight: default_max_in_flight(),
            name: None,
        }
    }
}

struct Semaphore {
    available: Mutex<usize>,
    cond: Condvar,
}

struct Permit<'a>(&'a Semaphore);

impl Semaphore {
    fn new(n: usize) -> Self {
        Self {
            available: Mutex::new(n.max(1)),
            cond: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut n = self.available.lock().unwrap_or_else(|e| e.into_inner());
        while *n == 0 {
            n = self.cond.wait(n).unwrap_or_else(|e| e.into_inner());
        }
        *n -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        let mut n = self.0.available.lock().unwrap_or_else(|e| e.into_inner());
        *n += 1;
        self.0.cond.notify_one();
    }
}

/// A [`TsvScorer`] backed by the wire protocol.
///
/// Uses a blocking HTTP client, so it must be driven from ordinary threads
/// (not from inside an async task). At most `max_in_flight` requests are
/// outstanding at once across all callers.
pub struct RemoteScorer {
    config: RemoteScorerConfig,
    client: OnceLock<Result<reqwest::blocking::Client, String>>,
    permits: Semaphore,
}

impl RemoteScorer {
    pub fn new(config: RemoteScorerConfig) -> Self {
        let permits = Semaphore::new(config.max_in_flight);
        Self {
            config,
            client: OnceLock::new(),
            permits,
        }
    }

    pub fn config(&self) -> &RemoteScorerConfig {
        &self.config
    }

    fn client(&self) -> Result<&reqwest::blocking::Client, ScorerError> {
        self.client
            .get_or_init(|| {
                reqwest::blocking::Client::builder()
                    .timeout(Duration::from_millis(self.config.timeout_ms))
                    .build()
                    .map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(|e| ScorerError::Unavailable(e.clone()))
    }

    fn post<B: Serialize, R: for<'de> Deserialize<'de>>(&self, body: &B) -> Result<R, ScorerError> {
        let client = self.client()?;
        let _permit = self.permits.acquire();
        let resp = client
            .post(&self.config.endpoint)
            .json(body)
            .send()
            .map_err(|e| ScorerError::Unavailable(format!("{}: {e}", self.config.endpoint)))?;
        let status = resp.status();
        if !status.is_success() {
            return Err(ScorerError::Unavailable(format!(
                "{} answered {status}",
                self.config.endpoint
            )));
        }
        let text = resp
            .text()
            .map_err(|e| ScorerError::Unavailable(e.to_string()))?;
        serde_json::from_str(&text)
            .map_err(|e| ScorerError::Protocol(format!("malformed response: {e}")))
    }
}

impl TsvScorer for RemoteScorer {
    fn name(&self) -> String {
        self.config
            .name
            .clone()
            .unwrap_or_else(|| format!("remote:{}", self.config.endpoint))
    }

    fn score(&self, pairs: &[ContextGlossPair]) -> Result<Vec<Confidence>, ScorerError> {
        let mut out = Vec::with_capacity(pairs.len());
        let to_wire = |p: &ContextGlossPair| WireRequest {
            context: p.context.clone(),
            gloss: p.gloss.clone(),
        };
        if self.config.batch_size <= 1 {
            for p in pairs {
                let r: WireResponse = self.post(&to_wire(p))?;
                out.push(Confidence::new(r.true_confidence, r.false_confidence));
            }
            return Ok(out);
        }
        for chunk in pairs.chunks(self.config.batch_size) {
            let body: Vec<WireRequest> = chunk.iter().map(to_wire).collect();
            let resp: Vec<WireResponse> = self.post(&body)?;
            if resp.len() != chunk.len() {
                return Err(ScorerError::Protocol(format!(
                    "batch of {} answered with {} results",
                    chunk.len(),
                    resp.len()
                )));
            }
            out.extend(
                resp.into_iter()
                    .map(|r| Confidence::new(r.true_confidence, r.false_confidence)),
            );
        }
        Ok(out)
    }
}
