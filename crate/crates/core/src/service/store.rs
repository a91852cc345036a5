//! Append-only annotation log with periodic snapshots.
//!
//! Each accepted bulk request becomes exactly one log line, written with a
//! single `write_all` and synced before the in-memory state changes. A crash
//! can therefore leave at most one incomplete trailing line, which replay
//! discards, so the recovered state is always "before" or "after" a request.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File, OpenOptions};
use std::io::{self, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::model::{
    AnnotationKey, AnnotatorId, InventoryId, LemmaId, ScoreCategory, ScoredSenseAnnotation,
    SenseId, SentenceId, TokenRef,
};

pub const LOG_FILE: &str = "annotations.log";
pub const SNAPSHOT_FILE: &str = "snapshot.json";

/// One annotator's view of one token occurrence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OccurrenceKey {
    pub sentence_id: SentenceId,
    pub token_position: usize,
    pub annotator_id: AnnotatorId,
}

impl OccurrenceKey {
    pub fn new(token: &TokenRef, annotator: &AnnotatorId) -> Self {
        Self {
            sentence_id: token.sentence_id.clone(),
            token_position: token.token_position,
            annotator_id: annotator.clone(),
        }
    }

    pub fn token(&self) -> TokenRef {
        TokenRef::new(self.sentence_id.clone(), self.token_position)
    }
}

/// A committed bulk write, as stored in the log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogRecord {
    pub seq: u64,
    pub annotator_id: AnnotatorId,
    pub lemma_id: LemmaId,
    pub inventory_id: InventoryId,
    pub occurrences: Vec<TokenRef>,
    /// Occurrences whose earlier annotations were dropped because the lemma changed.
    pub superseded: Vec<TokenRef>,
    pub annotations: Vec<ScoredSenseAnnotation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct StoredScore {
    category: ScoreCategory,
    timestamp: DateTime<Utc>,
}

/// The full mutable state. Equality is what the crash-safety tests compare.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoreState {
    pub seq: u64,
    #[serde(with = "pairs")]
    scores: BTreeMap<AnnotationKey, StoredScore>,
    #[serde(with = "pairs")]
    versions: BTreeMap<OccurrenceKey, u64>,
    #[serde(with = "pairs")]
    lemmas: BTreeMap<OccurrenceKey, LemmaId>,
}

// JSON maps need string keys; store these maps as lists of pairs instead.
mod pairs {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<K: Serialize, V: Serialize, S: Serializer>(
        map: &BTreeMap<K, V>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        s.collect_seq(map.iter())
    }

    pub fn deserialize<'de, K, V, D>(d: D) -> Result<BTreeMap<K, V>, D::Error>
    where
        K: Deserialize<'de> + Ord,
        V: Deserialize<'de>,
        D: Deserializer<'de>,
    {
        Ok(Vec::<(K, V)>::deserialize(d)?.into_iter().collect())
    }
}

impl StoreState {
    pub fn apply(&mut self, record: &LogRecord) {
        for occ in &record.superseded {
            let key = OccurrenceKey::new(occ, &record.annotator_id);
            self.scores.retain(|k, _| {
                !(k.sentence_id == key.sentence_id
                    && k.token_position == key.token_position
                    && k.annotator_id == key.annotator_id)
            });
        }
        for occ in &record.occurrences {
            let key = OccurrenceKey::new(occ, &record.annotator_id);
            *self.versions.entry(key.clone()).or_insert(0) += 1;
            self.lemmas.insert(key, record.lemma_id.clone());
        }
        for a in &record.annotations {
            self.scores.insert(
                a.key(),
                StoredScore {
                    category: a.category,
                    timestamp: a.timestamp,
                },
            );
        }
        self.seq = record.seq;
    }

    pub fn version(&self, key: &OccurrenceKey) -> u64 {
        self.versions.get(key).copied().unwrap_or(0)
    }

    pub fn lemma(&self, key: &OccurrenceKey) -> Option<&LemmaId> {
        self.lemmas.get(key)
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn annotations(&self) -> Vec<ScoredSenseAnnotation> {
        self.scores
            .iter()
            .map(|(k, v)| ScoredSenseAnnotation {
                sentence_id: k.sentence_id.clone(),
                token_position: k.token_position,
                sense_id: k.sense_id.clone(),
                inventory_id: k.inventory_id.clone(),
                category: v.category,
                annotator_id: k.annotator_id.clone(),
                timestamp: v.timestamp,
            })
            .collect()
    }

    /// Annotations by one annotator on the given occurrences.
    pub fn annotations_at(
        &self,
        annotator: &AnnotatorId,
        tokens: &BTreeSet<TokenRef>,
    ) -> Vec<ScoredSenseAnnotation> {
        self.annotations()
            .into_iter()
            .filter(|a| &a.annotator_id == annotator && tokens.contains(&a.token()))
            .collect()
    }

    /// Whether the annotator has scored anything at this occurrence.
    pub fn touched(&self, key: &OccurrenceKey) -> bool {
        self.versions.contains_key(key)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("stale write for {key:?}: expected version {expected}, current {current}")]
    Conflict {
        key: OccurrenceKey,
        expected: u64,
        current: u64,
    },
    #[error("store i/o at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("corrupt log line {line} in {path}: {message}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

/// A target occurrence with the version the client last saw.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Target {
    pub sentence_id: SentenceId,
    pub token_position: usize,
    /// If set, the write is rejected unless the occurrence is still at this version.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_version: Option<u64>,
}

impl Target {
    pub fn token(&self) -> TokenRef {
        TokenRef::new(self.sentence_id.clone(), self.token_position)
    }
}

/// A validated write: one category per sense for every target occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BulkWrite {
    pub annotator_id: AnnotatorId,
    pub lemma_id: LemmaId,
    pub inventory_id: InventoryId,
    pub scores: BTreeMap<SenseId, ScoreCategory>,
    pub targets: Vec<Target>,
}

pub struct AnnotationStore {
    state: StoreState,
    dir: Option<PathBuf>,
    log: Option<File>,
    log_len: u64,
    snapshot_every: u64,
    since_snapshot: u64,
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_owned(),
        source,
    }
}

/// Replays `bytes` (log content) on top of `state`.
///
/// Returns the byte length of the valid prefix. An unterminated final line
/// is a torn write and is ignored; a bad terminated line is corruption.
pub fn replay(state: &mut StoreState, bytes: &[u8], path: &Path) -> Result<u64, StoreError> {
    let mut offset = 0usize;
    let mut line_no = 0usize;
    while offset < bytes.len() {
        let Some(nl) = bytes[offset..].iter().position(|&b| b == b'\n') else {
            break;
        };
        line_no += 1;
        let line = &bytes[offset..offset + nl];
        offset += nl + 1;
        if line.iter().all(u8::is_ascii_whitespace) {
            continue;
        }
        let record: LogRecord = serde_json::from_slice(line).map_err(|e| StoreError::Corrupt {
            path: path.to_owned(),
            line: line_no,
            message: e.to_string(),
        })?;
        if record.seq > state.seq {
            state.apply(&record);
        }
    }
    Ok(offset as u64)
}

impl AnnotationStore {
    /// A store that keeps nothing on disk.
    pub fn in_memory() -> Self {
        Self {
            state: StoreState::default(),
            dir: None,
            log: None,
            log_len: 0,
            snapshot_every: 0,
            since_snapshot: 0,
        }
    }

    /// Opens (or creates) a store in `dir`: loads the snapshot, replays the
    /// log after it, and cuts off a torn trailing line if there is one.
    pub fn open(dir: &Path, snapshot_every: u64) -> Result<Self, StoreError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let snap_path = dir.join(SNAPSHOT_FILE);
        let mut state = match fs::read(&snap_path) {
            Ok(bytes) => serde_json::from_slice(&bytes).map_err(|e| StoreError::Corrupt {
                path: snap_path.clone(),
                line: 0,
                message: e.to_string(),
            })?,
            Err(e) if e.kind() == io::ErrorKind::NotFound => StoreState::default(),
            Err(e) => return Err(io_err(&snap_path)(e)),
        };

        let log_path = dir.join(LOG_FILE);
        let mut log = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(&log_path)
            .map_err(io_err(&log_path))?;
        let mut bytes = Vec::new();
        log.read_to_end(&mut bytes).map_err(io_err(&log_path))?;
        let valid = replay(&mut state, &bytes, &log_path)?;
        if valid < bytes.len() as u64 {
            tracing::warn!(
                discarded = bytes.len() as u64 - valid,
                "discarding torn trailing log line"
            );
            log.set_len(valid).map_err(io_err(&log_path))?;
            log.seek(SeekFrom::End(0)).map_err(io_err(&log_path))?;
        }
        Ok(Self {
            state,
            dir: Some(dir.to_owned()),
            log: Some(log),
            log_len: valid,
            snapshot_every,
            since_snapshot: 0,
        })
    }

    pub fn state(&self) -> &StoreState {
        &self.state
    }

    pub fn annotations(&self) -> Vec<ScoredSenseAnnotation> {
        self.state.annotations()
    }

    /// Checks versions, then logs and applies the write as one record.
    pub fn apply_bulk(
        &mut self,
        write: &BulkWrite,
        now: DateTime<Utc>,
    ) -> Result<LogRecord, StoreError> {
        let mut occurrences = Vec::with_capacity(write.targets.len());
        let mut superseded = Vec::new();
        let mut seen = BTreeSet::new();
        for t in &write.targets {
            let token = t.token();
            let key = OccurrenceKey::new(&token, &write.annotator_id);
            let current = self.state.version(&key);
            if let Some(expected) = t.expected_version {
                if expected != current {
                    return Err(StoreError::Conflict {
                        key,
                        expected,
                        current,
                    });
                }
            }
            if !seen.insert(token.clone()) {
                continue;
            }
            if let Some(prev) = self.state.lemma(&key) {
                if prev != &write.lemma_id {
                    tracing::info!(occurrence = %token, from = %prev, to = %write.lemma_id, "lemma changed, superseding earlier scores");
                    superseded.push(token.clone());
                }
            }
            occurrences.push(token);
        }

        let annotations = occurrences
            .iter()
            .flat_map(|occ| {
                write
                    .scores
                    .iter()
                    .map(move |(sense, cat)| ScoredSenseAnnotation {
                        sentence_id: occ.sentence_id.clone(),
                        token_position: occ.token_position,
                        sense_id: sense.clone(),
                        inventory_id: write.inventory_id.clone(),
                        category: *cat,
                        annotator_id: write.annotator_id.clone(),
                        timestamp: now,
                    })
            })
            .collect();

        let record = LogRecord {
            seq: self.state.seq + 1,
            annotator_id: write.annotator_id.clone(),
            lemma_id: write.lemma_id.clone(),
            inventory_id: write.inventory_id.clone(),
            occurrences,
            superseded,
            annotations,
        };
        self.append(&record)?;
        self.state.apply(&record);
        self.since_snapshot += 1;
        if self.snapshot_every > 0 && self.since_snapshot >= self.snapshot_every {
            self.snapshot()?;
        }
        Ok(record)
    }

    fn append(&mut self, record: &LogRecord) -> Result<(), StoreError> {
        let (Some(log), Some(dir)) = (self.log.as_mut(), self.dir.as_ref()) else {
            return Ok(());
        };
        let path = dir.join(LOG_FILE);
        let mut line = serde_json::to_vec(record).expect("log records serialize");
        line.push(b'\n');
        let result = log.write_all(&line).and_then(|_| log.sync_data());
        if let Err(e) = result {
            // Drop whatever part of the line reached the file.
            let _ = log.set_len(self.log_len);
            let _ = log.seek(SeekFrom::End(0));
            return Err(io_err(&path)(e));
        }
        self.log_len += line.len() as u64;
        Ok(())
    }

    /// Writes the current state to the snapshot file atomically.
    pub fn snapshot(&mut self) -> Result<(), StoreError> {
        let Some(dir) = self.dir.as_ref() else {
            return Ok(());
        };
        let tmp = dir.join(format!("{SNAPSHOT_FILE}.tmp"));
        let path = dir.join(SNAPSHOT_FILE);
        let bytes = serde_json::to_vec(&self.state).expect("state serializes");
        let mut f = File::create(&tmp).map_err(io_err(&tmp))?;
        f.write_all(&bytes).map_err(io_err(&tmp))?;
        f.sync_all().map_err(io_err(&tmp))?;
        fs::rename(&tmp, &path).map_err(io_err(&path))?;
        self.since_snapshot = 0;
        Ok(())
    }
}
