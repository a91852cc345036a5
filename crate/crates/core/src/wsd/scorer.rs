use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ContextGlossPair, GoldStandard, RemoteScorer, RemoteScorerConfig};
use crate::model::ScoreCategory;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScorerError {
    #[error("{0}")]
    Unavailable(String),
    #[error("{0}")]
    Protocol(String),
}

/// True/False label confidences for one pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Confidence {
    pub true_confidence: f64,
    pub false_confidence: f64,
}

impl Confidence {
    pub fn new(true_confidence: f64, false_confidence: f64) -> Self {
        Self {
            true_confidence,
            false_confidence,
        }
    }

    pub(crate) fn check(&self) -> Result<(), String> {
        for v in [self.true_confidence, self.false_confidence] {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(format!("confidence {v} outside [0, 1]"));
            }
        }
        Ok(())
    }
}

/// A binary classifier over (context, gloss) pairs.
///
/// Implementations must return one confidence per input pair, in order, and
/// be deterministic for fixed inputs and configuration.
pub trait TsvScorer: Send + Sync {
    fn name(&self) -> String;

    fn score(&self, pairs: &[ContextGlossPair]) -> Result<Vec<Confidence>, ScorerError>;
}

/// Gives 1.0 to every sense the gold annotation scores at or above the
/// threshold and 0.0 to the rest. For harness self-tests.
#[derive(Debug, Clone)]
pub struct GoldOracleScorer {
    gold: Arc<GoldStandard>,
    threshold: ScoreCategory,
}

impl GoldOracleScorer {
    pub fn new(gold: Arc<GoldStandard>, threshold: ScoreCategory) -> Self {
        Self { gold, threshold }
    }
}

impl TsvScorer for GoldOracleScorer {
    fn name(&self) -> String {
        "gold-oracle".to_owned()
    }

    fn score(&self, pairs: &[ContextGlossPair]) -> Result<Vec<Confidence>, ScorerError> {
        Ok(pairs
            .iter()
            .map(|p| {
                if self
                    .gold
                    .is_correct(&p.token, &p.inventory_id, &p.sense_id, self.threshold)
                {
                    Confidence::new(1.0, 0.0)
                } else {
                    Confidence::new(0.0, 1.0)
                }
            })
            .collect())
    }
}

/// Stable pseudo-random confidences derived from the pair text and a seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PseudoScorer {
    pub seed: u64,
}

impl PseudoScorer {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    fn confidence(&self, context: &str, gloss: &str) -> f64 {
        let mut h = Sha256::new();
        h.update(self.seed.to_le_bytes());
        h.update(context.as_bytes());
        h.update([0x1f]);
        h.update(gloss.as_bytes());
        let digest = h.finalize();
        let mut bytes = [0u8; 8];
        bytes.copy_from_slice(&digest[..8]);
        // top 53 bits -> [0, 1)
        (u64::from_le_bytes(bytes) >> 11) as f64 / (1u64 << 53) as f64
    }
}

impl TsvScorer for PseudoScorer {
    fn name(&self) -> String {
        format!("pseudo:{}", self.seed)
    }

    fn score(&self, pairs: &[ContextGlossPair]) -> Result<Vec<Confidence>, ScorerError> {
        Ok(pairs
            .iter()
            .map(|p| {
                let t = self.confidence(&p.context, &p.gloss);
                Confidence::new(t, 1.0 - t)
            })
            .collect())
    }
}

/// The inverse of [`GoldOracleScorer`]: prefers every incorrect sense.
/// Top-1 is 0% whenever each evaluated token has an incorrect candidate.
#[derive(Debug, Clone)]
pub struct AdversarialScorer {
    oracle: GoldOracleScorer,
}

impl AdversarialScorer {
    pub fn new(gold: Arc<GoldStandard>, threshold: ScoreCategory) -> Self {
        Self {
            oracle: GoldOracleScorer::new(gold, threshold),
        }
    }
}

impl TsvScorer for AdversarialScorer {
    fn name(&self) -> String {
        "adversarial".to_owned()
    }

    fn score(&self, pairs: &[ContextGlossPair]) -> Result<Vec<Confidence>, ScorerError> {
        Ok(self
            .oracle
            .score(pairs)?
            .into_iter()
            .map(|c| Confidence::new(c.false_confidence, c.true_confidence))
            .collect())
    }
}

/// A scorer described as data, for config files, the CLI and the HTTP API.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScorerSpec {
    GoldOracle,
    Adversarial,
    Pseudo { seed: u64 },
    Remote(RemoteScorerConfig),
}

impl ScorerSpec {
    /// Builds the scorer. Gold-backed kinds read `gold` at `threshold`.
    pub fn build(&self, gold: Arc<GoldStandard>, threshold: ScoreCategory) -> Box<dyn TsvScorer> {
        match self {
            ScorerSpec::GoldOracle => Box::new(GoldOracleScorer::new(gold, threshold)),
            ScorerSpec::Adversarial => Box::new(AdversarialScorer::new(gold, threshold)),
            ScorerSpec::Pseudo { seed } => Box::new(PseudoScorer::new(*seed)),
            ScorerSpec::Remote(cfg) => Box::new(RemoteScorer::new(cfg.clone())),
        }
    }
}

impl FromStr for ScorerSpec {
    type Err = String;

    /// `gold-oracle`, `adversarial`, `pseudo:SEED` or an `http(s)://` endpoint.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gold-oracle" => Ok(ScorerSpec::GoldOracle),
            "adversarial" => Ok(ScorerSpec::Adversarial),
            "pseudo" => Ok(ScorerSpec::Pseudo { seed: 0 }),
            _ => {
                if let Some(seed) = s.strip_prefix("pseudo:") {
                    let seed = seed
                        .parse()
                        .map_err(|_| format!("bad pseudo seed {seed:?}"))?;
                    Ok(ScorerSpec::Pseudo { seed })
                } else if s.starts_with("http://") || s.starts_with("https://") {
                    Ok(ScorerSpec::Remote(RemoteScorerConfig::new(s)))
                } else {
                    Err(format!(
                        "unknown scorer {s:?} (expected gold-oracle, adversarial, pseudo:SEED or a URL)"
                    ))
                }
            }
        }
    }
}
