use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ids::{LemmaId, SentenceId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenClass {
    Noun,
    Verb,
    FunctionWord,
    Digit,
    Punctuation,
}

impl TokenClass {
    pub const ALL: [TokenClass; 5] = [
        TokenClass::Noun,
        TokenClass::Verb,
        TokenClass::FunctionWord,
        TokenClass::Digit,
        TokenClass::Punctuation,
    ];

    /// Digits and punctuation only ever carry the fixed sentinel senses.
    pub fn is_sentinel(self) -> bool {
        matches!(self, TokenClass::Digit | TokenClass::Punctuation)
    }

    pub fn is_content(self) -> bool {
        matches!(self, TokenClass::Noun | TokenClass::Verb)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TokenClass::Noun => "noun",
            TokenClass::Verb => "verb",
            TokenClass::FunctionWord => "function_word",
            TokenClass::Digit => "digit",
            TokenClass::Punctuation => "punctuation",
        }
    }
}

impl fmt::Display for TokenClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TokenClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TokenClass::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown token class {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub position: usize,
    pub surface: String,
    pub token_class: TokenClass,
    pub gold_lemma_id: Option<LemmaId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub sentence_id: SentenceId,
    pub tokens: Vec<Token>,
}

impl Sentence {
    /// Builds a sentence, checking that positions are `0..n` in order and
    /// surfaces are non-empty.
    pub fn new(sentence_id: SentenceId, tokens: Vec<Token>) -> Result<Self, String> {
        for (i, t) in tokens.iter().enumerate() {
            if t.position != i {
                return Err(format!(
                    "sentence {sentence_id}: token at index {i} has position {}",
                    t.position
                ));
            }
            if t.surface.is_empty() {
                return Err(format!(
                    "sentence {sentence_id}: empty surface at position {i}"
                ));
            }
        }
        Ok(Self {
            sentence_id,
            tokens,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn token(&self, position: usize) -> Option<&Token> {
        self.tokens.get(position)
    }

    pub fn surfaces(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.surface.as_str())
    }
}

/// A token occurrence: sentence id plus position.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TokenRef {
    pub sentence_id: SentenceId,
    pub token_position: usize,
}

impl TokenRef {
    pub fn new(sentence_id: SentenceId, token_position: usize) -> Self {
        Self {
            sentence_id,
            token_position,
        }
    }
}

impl fmt::Display for TokenRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.sentence_id, self.token_position)
    }
}

/// An ordered collection of sentences with an id index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    sentences: Vec<Sentence>,
    index: HashMap<SentenceId, usize>,
}

impl Corpus {
    pub fn new(sentences: Vec<Sentence>) -> Result<Self, String> {
        let mut index = HashMap::with_capacity(sentences.len());
        for (i, s) in sentences.iter().enumerate() {
            if index.insert(s.sentence_id.clone(), i).is_some() {
                return Err(format!("duplicate sentence id {}", s.sentence_id));
            }
        }
        Ok(Self { sentences, index })
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn sentence(&self, id: &SentenceId) -> Option<&Sentence> {
        self.index.get(id).map(|&i| &self.sentences[i])
    }

    pub fn token(&self, r: &TokenRef) -> Option<&Token> {
        self.sentence(&r.sentence_id)?.token(r.token_position)
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }

    /// Every token occurrence with its sentence.
    pub fn occurrences(&self) -> impl Iterator<Item = (&Sentence, &Token)> {
        self.sentences
            .iter()
            .flat_map(|s| s.tokens.iter().map(move |t| (s, t)))
    }
}
