//! End-to-end disambiguation on top of a target-sense-verification scorer.
//!
//! Three phases: look up the candidate glosses of the target's lemma, score
//! every (context, gloss) pair independently, then rank the glosses by their
//! True confidence.

mod gold;
mod remote;
mod scorer;
mod window;

pub use gold::GoldStandard;
pub use remote::{RemoteScorer, RemoteScorerConfig, WireRequest, WireResponse};
pub use scorer::{
    AdversarialScorer, Confidence, GoldOracleScorer, PseudoScorer, ScorerError, ScorerSpec,
    TsvScorer,
};
pub use window::{extract_window, ContextWindow, WindowSize};

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::{
    InventoryId, LemmaId, Sense, SenseId, SenseInventory, Sentence, Token, TokenClass, TokenRef,
};

/// Marker inserted around the target for `Markup::Unused0`.
pub const UNUSED0_MARKER: &str = "[UNUSED0]";
pub const XML_OPEN: &str = "<token>";
pub const XML_CLOSE: &str = "</token>";

/// How the target word is highlighted in the rendered context.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Markup {
    #[default]
    None,
    /// `<token>w</token>`
    XmlToken,
    /// `[UNUSED0] w [UNUSED0]`
    Unused0,
}

impl fmt::Display for Markup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Markup::None => "none",
            Markup::XmlToken => "xml_token",
            Markup::Unused0 => "unused0",
        })
    }
}

impl FromStr for Markup {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "none" => Ok(Markup::None),
            "xml_token" | "xml" | "token" => Ok(Markup::XmlToken),
            "unused0" => Ok(Markup::Unused0),
            _ => Err(format!("unknown markup {s:?}")),
        }
    }
}

/// Renders the window as space-joined text with the target marked up.
pub fn render_context(window: &ContextWindow, markup: Markup) -> String {
    let mut parts: Vec<String> = window.tokens.clone();
    let target = &mut parts[window.target_offset];
    match markup {
        Markup::None => {}
        Markup::XmlToken => *target = format!("{XML_OPEN}{target}{XML_CLOSE}"),
        Markup::Unused0 => *target = format!("{UNUSED0_MARKER} {target} {UNUSED0_MARKER}"),
    }
    parts.join(" ")
}

/// Removes the markers added by [`render_context`].
pub fn strip_markup(text: &str, markup: Markup) -> String {
    match markup {
        Markup::None => text.to_owned(),
        Markup::XmlToken => text.replacen(XML_OPEN, "", 1).replacen(XML_CLOSE, "", 1),
        Markup::Unused0 => text
            .replacen(&format!("{UNUSED0_MARKER} "), "", 1)
            .replacen(&format!(" {UNUSED0_MARKER}"), "", 1),
    }
}

/// One (context, candidate gloss) unit sent to the scorer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextGlossPair {
    pub token: TokenRef,
    pub inventory_id: InventoryId,
    pub sense_id: SenseId,
    pub rank_in_lemma: usize,
    pub markup: Markup,
    pub context: String,
    pub gloss: String,
}

/// A scorer's verdict on one pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TsvScore {
    pub sense_id: SenseId,
    pub rank_in_lemma: usize,
    pub true_confidence: f64,
    pub false_confidence: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WsdError {
    #[error("token {0} has no gold lemma")]
    MissingGoldLemma(TokenRef),
    #[error("no lemma found for {surface:?} at {token}")]
    LemmaNotFound { token: TokenRef, surface: String },
    #[error("external lemma mode requires a lemma table")]
    NoLemmatizer,
    #[error("token {token} is {class} and carries no lexicon senses")]
    NotSenseBearing { token: TokenRef, class: TokenClass },
    #[error("target position {0} is out of range")]
    TargetOutOfRange(TokenRef),
    #[error("scorer unavailable: {0}")]
    ScorerUnavailable(String),
    #[error("scorer protocol error: {0}")]
    ScorerProtocolError(String),
}

impl From<ScorerError> for WsdError {
    fn from(e: ScorerError) -> Self {
        match e {
            ScorerError::Unavailable(m) => WsdError::ScorerUnavailable(m),
            ScorerError::Protocol(m) => WsdError::ScorerProtocolError(m),
        }
    }
}

/// Where the target's lemma comes from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaMode {
    /// The corpus' gold lemma on the token.
    #[default]
    Gold,
    /// A pluggable lemmatizer keyed on the surface form.
    External,
}

impl FromStr for LemmaMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gold" => Ok(LemmaMode::Gold),
            "external" => Ok(LemmaMode::External),
            _ => Err(format!("unknown lemma mode {s:?}")),
        }
    }
}

pub trait Lemmatizer: Send + Sync {
    fn lemmatize(&self, surface: &str) -> Option<LemmaId>;
}

/// Surface form to lemma lookup table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LemmaTable(HashMap<String, LemmaId>);

impl LemmaTable {
    pub fn insert(&mut self, surface: impl Into<String>, lemma: LemmaId) {
        self.0.insert(surface.into(), lemma);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(String, LemmaId)> for LemmaTable {
    fn from_iter<I: IntoIterator<Item = (String, LemmaId)>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl Lemmatizer for LemmaTable {
    fn lemmatize(&self, surface: &str) -> Option<LemmaId> {
        self.0.get(surface).cloned()
    }
}

/// Resolves the target's lemma and returns its senses in lexicon order.
///
/// An empty list means the lemma is not in this inventory.
pub fn lookup_candidate_glosses(
    sentence: &Sentence,
    token: &Token,
    inventory: &SenseInventory,
    mode: LemmaMode,
    lemmatizer: Option<&dyn Lemmatizer>,
) -> Result<Vec<Sense>, WsdError> {
    let token_ref = TokenRef::new(sentence.sentence_id.clone(), token.position);
    if token.token_class.is_sentinel() {
        return Err(WsdError::NotSenseBearing {
            token: token_ref,
            class: token.token_class,
        });
    }
    let lemma = match mode {
        LemmaMode::Gold => token
            .gold_lemma_id
            .clone()
            .ok_or(WsdError::MissingGoldLemma(token_ref))?,
        LemmaMode::External => lemmatizer
            .ok_or(WsdError::NoLemmatizer)?
            .lemmatize(&token.surface)
            .ok_or_else(|| WsdError::LemmaNotFound {
                token: token_ref,
                surface: token.surface.clone(),
            })?,
    };
    Ok(inventory.senses_of(&lemma).into_iter().cloned().collect())
}

/// One pair per candidate, all sharing the same marked-up context string.
pub fn build_pairs(
    window: &ContextWindow,
    candidates: &[Sense],
    markup: Markup,
) -> Vec<ContextGlossPair> {
    let context = render_context(window, markup);
    let token = TokenRef::new(window.sentence_id.clone(), window.target_position);
    candidates
        .iter()
        .map(|s| ContextGlossPair {
            token: token.clone(),
            inventory_id: s.inventory_id.clone(),
            sense_id: s.sense_id.clone(),
            rank_in_lemma: s.rank_in_lemma,
            markup,
            context: context.clone(),
            gloss: s.gloss.clone(),
        })
        .collect()
}

/// Runs the scorer and aligns its output with the pairs.
///
/// Each pair is judged on its own; nothing here compares or normalises
/// scores across pairs.
pub fn score_pairs(
    scorer: &dyn TsvScorer,
    pairs: &[ContextGlossPair],
) -> Result<Vec<TsvScore>, WsdError> {
    if pairs.is_empty() {
        return Ok(Vec::new());
    }
    let confidences = scorer.score(pairs)?;
    if confidences.len() != pairs.len() {
        return Err(WsdError::ScorerProtocolError(format!(
            "{} returned {} scores for {} pairs",
            scorer.name(),
            confidences.len(),
            pairs.len()
        )));
    }
    pairs
        .iter()
        .zip(confidences)
        .map(|(p, c)| {
            c.check().map_err(WsdError::ScorerProtocolError)?;
            Ok(TsvScore {
                sense_id: p.sense_id.clone(),
                rank_in_lemma: p.rank_in_lemma,
                true_confidence: c.true_confidence,
                false_confidence: c.false_confidence,
            })
        })
        .collect()
}

/// Sense ids by descending True confidence; ties go to the lower lexicon rank.
pub fn rank_glosses(scores: &[TsvScore]) -> Vec<SenseId> {
    let mut order: Vec<&TsvScore> = scores.iter().collect();
    order.sort_by(|a, b| {
        b.true_confidence
            .total_cmp(&a.true_confidence)
            .then(a.rank_in_lemma.cmp(&b.rank_in_lemma))
    });
    order.into_iter().map(|s| s.sense_id.clone()).collect()
}

/// Pipeline settings that do not depend on the scorer itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub window: WindowSize,
    #[serde(default)]
    pub markup: Markup,
    #[serde(default)]
    pub lemma_mode: LemmaMode,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            window: WindowSize::Tokens(11),
            markup: Markup::None,
            lemma_mode: LemmaMode::Gold,
        }
    }
}

/// Ranks the candidate senses of the token at `position`.
pub fn disambiguate(
    sentence: &Sentence,
    position: usize,
    inventory: &SenseInventory,
    scorer: &dyn TsvScorer,
    config: &PipelineConfig,
    lemmatizer: Option<&dyn Lemmatizer>,
) -> Result<Vec<SenseId>, WsdError> {
    let token_ref = TokenRef::new(sentence.sentence_id.clone(), position);
    let token = sentence
        .token(position)
        .ok_or_else(|| WsdError::TargetOutOfRange(token_ref.clone()))?;
    let candidates =
        lookup_candidate_glosses(sentence, token, inventory, config.lemma_mode, lemmatizer)?;
    if candidates.is_empty() {
        return Err(WsdError::LemmaNotFound {
            token: token_ref,
            surface: token.surface.clone(),
        });
    }
    let window = extract_window(sentence, position, config.window)
        .ok_or(WsdError::TargetOutOfRange(token_ref))?;
    let pairs = build_pairs(&window, &candidates, config.markup);
    let scores = score_pairs(scorer, &pairs)?;
    Ok(rank_glosses(&scores))
}

#[cfg(test)]
mod tests;
