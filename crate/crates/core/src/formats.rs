//! Line-oriented JSON file formats for corpora, lexicons, annotations and
//! entity tags, plus the flat per-token CSV export.
//!
//! Every file is UTF-8 with one JSON object per line. Blank lines are
//! ignored. Field names are documented in `FORMATS.md`.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::model::{
    from_iob2, to_iob2, Corpus, EntityMention, InventoryId, Iob2Error, Lemma, LemmaId,
    LexiconError, ScoredSenseAnnotation, Sense, SenseId, SenseInventory, Sentence, SentenceId,
    Token, TokenClass,
};
use crate::wsd::LemmaTable;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error("line {line}: {source}")]
    Iob2 {
        line: usize,
        #[source]
        source: Iob2Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<FormatError>,
    },
}

impl FormatError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        FormatError::Io {
            path: path.to_owned(),
            source,
        }
    }
}

/// Tags a parse error with the file it came from.
fn in_file<T>(path: &Path, r: Result<T, FormatError>) -> Result<T, FormatError> {
    r.map_err(|e| match e {
        FormatError::Io { .. } | FormatError::InFile { .. } => e,
        other => FormatError::InFile {
            path: path.to_owned(),
            source: Box::new(other),
        },
    })
}

fn open(path: &Path) -> Result<BufReader<File>, FormatError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| FormatError::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>, FormatError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| FormatError::io(path, e))
}

/// Parses one JSON value per non-blank line.
pub fn read_jsonl<T: DeserializeOwned, R: BufRead>(reader: R) -> Result<Vec<T>, FormatError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| FormatError::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| FormatError::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(value);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize, W: Write>(mut writer: W, items: &[T]) -> io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut writer, item)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

// ---------------------------------------------------------------- corpus

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TokenRecord {
    surface: String,
    class: TokenClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lemma: Option<LemmaId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SentenceRecord {
    sentence_id: SentenceId,
    tokens: Vec<TokenRecord>,
}

pub fn parse_corpus<R: BufRead>(reader: R) -> Result<Corpus, FormatError> {
    let records: Vec<SentenceRecord> = read_jsonl(reader)?;
    let mut sentences = Vec::with_capacity(records.len());
    for (line, rec) in records.into_iter().enumerate() {
        let tokens = rec
            .tokens
            .into_iter()
            .enumerate()
            .map(|(position, t)| Token {
                position,
                surface: t.surface,
                token_class: t.class,
                gold_lemma_id: t.lemma,
            })
            .collect();
        let s = Sentence::new(rec.sentence_id, tokens).map_err(|message| FormatError::Parse {
            line: line + 1,
            message,
        })?;
        sentences.push(s);
    }
    Corpus::new(sentences).map_err(FormatError::Invalid)
}

pub fn read_corpus(path: &Path) -> Result<Corpus, FormatError> {
    in_file(path, parse_corpus(open(path)?))
}

pub fn write_corpus<W: Write>(writer: W, corpus: &Corpus) -> io::Result<()> {
    let records: Vec<SentenceRecord> = corpus
        .sentences()
        .iter()
        .map(|s| SentenceRecord {
            sentence_id: s.sentence_id.clone(),
            tokens: s
                .tokens
                .iter()
                .map(|t| TokenRecord {
                    surface: t.surface.clone(),
                    class: t.token_class,
                    lemma: t.gold_lemma_id.clone(),
                })
                .collect(),
        })
        .collect();
    write_jsonl(writer, &records)
}

// ---------------------------------------------------------------- lexicon

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SenseRecord {
    sense_id: SenseId,
    gloss: String,
    #[serde(default)]
    proper_noun: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct LemmaRecord {
    lemma_id: LemmaId,
    citation_form: String,
    #[serde(default)]
    pos: String,
    senses: Vec<SenseRecord>,
}

/// Parses a lexicon file. Sense order within each line is the lemma's sense rank.
pub fn parse_lexicon<R: BufRead>(
    inventory_id: InventoryId,
    reader: R,
) -> Result<SenseInventory, FormatError> {
    let records: Vec<LemmaRecord> = read_jsonl(reader)?;
    let mut lemmas = Vec::with_capacity(records.len());
    let mut senses = Vec::new();
    for rec in records {
        for (rank, s) in rec.senses.into_iter().enumerate() {
            senses.push(Sense {
                sense_id: s.sense_id,
                lemma_id: rec.lemma_id.clone(),
                gloss: s.gloss,
                inventory_id: inventory_id.clone(),
                rank_in_lemma: rank,
                is_proper_noun: s.proper_noun,
            });
        }
        lemmas.push(Lemma {
            lemma_id: rec.lemma_id,
            citation_form: rec.citation_form,
            pos: rec.pos,
        });
    }
    Ok(SenseInventory::new(inventory_id, lemmas, senses)?)
}

pub fn read_lexicon(inventory_id: InventoryId, path: &Path) -> Result<SenseInventory, FormatError> {
    in_file(path, parse_lexicon(inventory_id, open(path)?))
}

pub fn write_lexicon<W: Write>(writer: W, inventory: &SenseInventory) -> io::Result<()> {
    let records: Vec<LemmaRecord> = inventory
        .lemmas()
        .iter()
        .map(|l| LemmaRecord {
            lemma_id: l.lemma_id.clone(),
            citation_form: l.citation_form.clone(),
            pos: l.pos.clone(),
            senses: inventory
                .senses_of(&l.lemma_id)
                .into_iter()
                .map(|s| SenseRecord {
                    sense_id: s.sense_id.clone(),
                    gloss: s.gloss.clone(),
                    proper_noun: s.is_proper_noun,
                })
                .collect(),
        })
        .collect();
    write_jsonl(writer, &records)
}

// ---------------------------------------------------------------- annotations

pub fn parse_annotations<R: BufRead>(reader: R) -> Result<Vec<ScoredSenseAnnotation>, FormatError> {
    read_jsonl(reader)
}

pub fn read_annotations(path: &Path) -> Result<Vec<ScoredSenseAnnotation>, FormatError> {
    in_file(path, parse_annotations(open(path)?))
}

pub fn write_annotations<W: Write>(
    writer: W,
    annotations: &[ScoredSenseAnnotation],
) -> io::Result<()> {
    write_jsonl(writer, annotations)
}

// ---------------------------------------------------------------- entities

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct EntityRecord {
    sentence_id: SentenceId,
    tags: Vec<String>,
}

pub fn parse_entities<R: BufRead>(reader: R) -> Result<Vec<EntityMention>, FormatError> {
    let records: Vec<EntityRecord> = read_jsonl(reader)?;
    let mut out = Vec::new();
    for (i, rec) in records.iter().enumerate() {
        let mentions =
            from_iob2(&rec.sentence_id, &rec.tags).map_err(|source| FormatError::Iob2 {
                line: i + 1,
                source,
            })?;
        out.extend(mentions);
    }
    Ok(out)
}

pub fn read_entities(path: &Path) -> Result<Vec<EntityMention>, FormatError> {
    in_file(path, parse_entities(open(path)?))
}

/// Writes one tag line per corpus sentence, including sentences without mentions.
pub fn write_entities<W: Write>(
    writer: W,
    corpus: &Corpus,
    mentions: &[EntityMention],
) -> Result<(), FormatError> {
    let mut records = Vec::with_capacity(corpus.len());
    for s in corpus.sentences() {
        let own: Vec<EntityMention> = mentions
            .iter()
            .filter(|m| m.sentence_id == s.sentence_id)
            .cloned()
            .collect();
        let tags = to_iob2(s, &own).map_err(|source| FormatError::Iob2 { line: 0, source })?;
        records.push(EntityRecord {
            sentence_id: s.sentence_id.clone(),
            tags,
        });
    }
    write_jsonl(writer, &records).map_err(|e| FormatError::Invalid(e.to_string()))
}

// ---------------------------------------------------------------- lemma table

#[derive(Debug, Clone, Serialize, Deserialize)]
struct LemmaTableRecord {
    surface: String,
    lemma_id: LemmaId,
}

pub fn parse_lemma_table<R: BufRead>(reader: R) -> Result<LemmaTable, FormatError> {
    let records: Vec<LemmaTableRecord> = read_jsonl(reader)?;
    Ok(records
        .into_iter()
        .map(|r| (r.surface, r.lemma_id))
        .collect())
}

pub fn read_lemma_table(path: &Path) -> Result<LemmaTable, FormatError> {
    in_file(path, parse_lemma_table(open(path)?))
}

// ---------------------------------------------------------------- token csv

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct FlatToken {
    sentence_id: SentenceId,
    position: usize,
    surface: String,
    class: TokenClass,
    lemma: Option<LemmaId>,
}

/// Flat spreadsheet export: one row per token.
pub fn write_token_csv<W: Write>(writer: W, corpus: &Corpus) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(writer);
    for (s, t) in corpus.occurrences() {
        w.serialize(FlatToken {
            sentence_id: s.sentence_id.clone(),
            position: t.position,
            surface: t.surface.clone(),
            class: t.token_class,
            lemma: t.gold_lemma_id.clone(),
        })?;
    }
    w.flush().map_err(|e| FormatError::Invalid(e.to_string()))?;
    Ok(())
}

/// Inverse of [`write_token_csv`]. Rows of one sentence must be contiguous
/// and in position order.
pub fn read_token_csv<R: Read>(reader: R) -> Result<Corpus, FormatError> {
    let mut r = csv::Reader::from_reader(reader);
    let mut sentences: Vec<Sentence> = Vec::new();
    let mut current: Option<(SentenceId, Vec<Token>)> = None;
    let flush = |cur: Option<(SentenceId, Vec<Token>)>, out: &mut Vec<Sentence>| {
        if let Some((id, tokens)) = cur {
            out.push(Sentence::new(id, tokens).map_err(FormatError::Invalid)?);
        }
        Ok::<_, FormatError>(())
    };
    for row in r.deserialize::<FlatToken>() {
        let row = row?;
        let same = matches!(&current, Some((id, _)) if *id == row.sentence_id);
        if !same {
            flush(current.take(), &mut sentences)?;
            current = Some((row.sentence_id.clone(), Vec::new()));
        }
        if let Some((_, tokens)) = current.as_mut() {
            tokens.push(Token {
                position: row.position,
                surface: row.surface,
                token_class: row.class,
                gold_lemma_id: row.lemma.filter(|l| !l.as_str().is_empty()),
            });
        }
    }
    flush(current, &mut sentences)?;
    Corpus::new(sentences).map_err(FormatError::Invalid)
}

pub fn write_corpus_file(path: &Path, corpus: &Corpus) -> Result<(), FormatError> {
    write_corpus(create(path)?, corpus).map_err(|e| FormatError::io(path, e))
}

pub fn write_annotations_file(
    path: &Path,
    annotations: &[ScoredSenseAnnotation],
) -> Result<(), FormatError> {
    write_annotations(create(path)?, annotations).map_err(|e| FormatError::io(path, e))
}
