use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::model::{Sentence, SentenceId};

/// Number of tokens fed to the scorer around the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WindowSize {
    /// The whole sentence.
    All,
    /// `s` tokens centred on the target, `s` in {3, 5, 7, 9, 11}.
    Tokens(u8),
}

impl WindowSize {
    pub const SIZES: [WindowSize; 6] = [
        WindowSize::All,
        WindowSize::Tokens(3),
        WindowSize::Tokens(5),
        WindowSize::Tokens(7),
        WindowSize::Tokens(9),
        WindowSize::Tokens(11),
    ];

    pub fn tokens(s: u8) -> Result<Self, String> {
        match s {
            3 | 5 | 7 | 9 | 11 => Ok(WindowSize::Tokens(s)),
            _ => Err(format!(
                "window size must be one of 3, 5, 7, 9, 11 or all; got {s}"
            )),
        }
    }

    /// Tokens kept on each side of the target, `None` for the whole sentence.
    pub fn half(self) -> Option<usize> {
        match self {
            WindowSize::All => None,
            WindowSize::Tokens(s) => Some((usize::from(s) - 1) / 2),
        }
    }
}

impl fmt::Display for WindowSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowSize::All => f.write_str("all"),
            WindowSize::Tokens(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for WindowSize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(WindowSize::All);
        }
        let n: u8 = s
            .parse()
            .map_err(|_| format!("invalid window size {s:?}"))?;
        WindowSize::tokens(n)
    }
}

impl Serialize for WindowSize {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for WindowSize {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u8),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(n) => WindowSize::tokens(n),
            Raw::Text(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// The token slice around a target word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextWindow {
    pub sentence_id: SentenceId,
    pub target_position: usize,
    pub window_size: WindowSize,
    /// Sentence position of `tokens[0]`.
    pub start: usize,
    pub tokens: Vec<String>,
    pub target_offset: usize,
}

impl ContextWindow {
    pub fn target(&self) -> &str {
        &self.tokens[self.target_offset]
    }

    /// Tokens joined by single spaces.
    pub fn plain_text(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Cuts the window around `target_position`.
///
/// Near a sentence edge the window is truncated; the missing tokens are not
/// taken from the other side. Returns `None` if the position is out of range.
pub fn extract_window(
    sentence: &Sentence,
    target_position: usize,
    window_size: WindowSize,
) -> Option<ContextWindow> {
    if target_position >= sentence.len() {
        return None;
    }
    let (start, end) = match window_size.half() {
        None => (0, sentence.len() - 1),
        Some(half) => (
            target_position.saturating_sub(half),
            (target_position + half).min(sentence.len() - 1),
        ),
    };
    Some(ContextWindow {
        sentence_id: sentence.sentence_id.clone(),
        target_position,
        window_size,
        start,
        tokens: sentence.tokens[start..=end]
            .iter()
            .map(|t| t.surface.clone())
            .collect(),
        target_offset: target_position - start,
    })
}
