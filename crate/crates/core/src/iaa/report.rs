use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    cohen_kappa_thresholded, score_error, weighted_kappa, ErrorMetric, IaaError, PairedScores,
    Weighting,
};
use crate::model::{
    AnnotatorId, InventoryId, ScoreCategory, ScoredSenseAnnotation, SenseId, TokenRef,
    SYSTEM_INVENTORY,
};

/// Paired observations for one annotator pair in one inventory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pairing {
    pub scores: PairedScores,
    /// Items scored by the first annotator only.
    pub unpaired_a: usize,
    /// Items scored by the second annotator only.
    pub unpaired_b: usize,
}

/// Joins two annotators' scores on (token occurrence, sense) within one
/// inventory, in item-key order. Items scored by only one side are counted,
/// not paired.
pub fn pair_scores(
    annotations: &[ScoredSenseAnnotation],
    a: &AnnotatorId,
    b: &AnnotatorId,
    inventory: &InventoryId,
) -> Pairing {
    let collect = |who: &AnnotatorId| -> BTreeMap<(TokenRef, &SenseId), ScoreCategory> {
        annotations
            .iter()
            .filter(|x| &x.annotator_id == who && &x.inventory_id == inventory)
            .map(|x| ((x.token(), &x.sense_id), x.category))
            .collect()
    };
    let left = collect(a);
    let right = collect(b);
    let mut scores = Vec::new();
    let mut unpaired_a = 0;
    for (key, ca) in &left {
        match right.get(key) {
            Some(cb) => scores.push((*ca, *cb)),
            None => unpaired_a += 1,
        }
    }
    let unpaired_b = right.keys().filter(|k| !left.contains_key(*k)).count();
    Pairing {
        scores: PairedScores(scores),
        unpaired_a,
        unpaired_b,
    }
}

/// Every annotator pair (sorted, `a < b`) sharing at least one scored item.
pub fn annotator_pairs(annotations: &[ScoredSenseAnnotation]) -> Vec<(AnnotatorId, AnnotatorId)> {
    let mut by_item: BTreeMap<(TokenRef, &InventoryId, &SenseId), BTreeSet<&AnnotatorId>> =
        BTreeMap::new();
    for x in annotations {
        if x.inventory_id.as_str() == SYSTEM_INVENTORY {
            continue;
        }
        by_item
            .entry((x.token(), &x.inventory_id, &x.sense_id))
            .or_default()
            .insert(&x.annotator_id);
    }
    let mut pairs = BTreeSet::new();
    for who in by_item.values() {
        let who: Vec<_> = who.iter().collect();
        for i in 0..who.len() {
            for j in i + 1..who.len() {
                pairs.insert(((*who[i]).clone(), (*who[j]).clone()));
            }
        }
    }
    pairs.into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValues {
    pub kappa: f64,
    pub lwk: f64,
    pub qwk: f64,
    pub rmse: f64,
    pub mae: f64,
}

impl MetricValues {
    pub fn compute(pairs: &PairedScores) -> Result<Self, IaaError> {
        Ok(Self {
            kappa: cohen_kappa_thresholded(pairs)?,
            lwk: weighted_kappa(pairs, Weighting::Linear)?,
            qwk: weighted_kappa(pairs, Weighting::Quadratic)?,
            rmse: score_error(pairs, ErrorMetric::Rmse)?,
            mae: score_error(pairs, ErrorMetric::Mae)?,
        })
    }

    fn as_array(&self) -> [f64; 5] {
        [self.kappa, self.lwk, self.qwk, self.rmse, self.mae]
    }

    fn from_array(v: [f64; 5]) -> Self {
        Self {
            kappa: v[0],
            lwk: v[1],
            qwk: v[2],
            rmse: v[3],
            mae: v[4],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairAgreement {
    pub a: AnnotatorId,
    pub b: AnnotatorId,
    pub paired: usize,
    pub unpaired_a: usize,
    pub unpaired_b: usize,
    pub metrics: MetricValues,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: MetricValues,
    /// Population standard deviation across pairs.
    pub std: MetricValues,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InventoryAgreement {
    pub pairs: Vec<PairAgreement>,
    pub summary: MetricSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IaaReport {
    pub inventories: BTreeMap<InventoryId, InventoryAgreement>,
}

/// All five metrics per annotator pair per inventory, then the mean and
/// population standard deviation across pairs.
pub fn iaa_report(
    annotations: &[ScoredSenseAnnotation],
    pairs: &[(AnnotatorId, AnnotatorId)],
    inventories: &[InventoryId],
) -> Result<IaaReport, IaaError> {
    if pairs.is_empty() {
        return Err(IaaError::NoPairs);
    }
    let mut out = BTreeMap::new();
    for inventory in inventories {
        let per_pair: Vec<PairAgreement> = pairs
            .par_iter()
            .map(|(a, b)| {
                let pairing = pair_scores(annotations, a, b, inventory);
                let metrics =
                    MetricValues::compute(&pairing.scores).map_err(|e| IaaError::Pair {
                        a: a.to_string(),
                        b: b.to_string(),
                        inventory: inventory.to_string(),
                        source: Box::new(e),
                    })?;
                Ok(PairAgreement {
                    a: a.clone(),
                    b: b.clone(),
                    paired: pairing.scores.len(),
                    unpaired_a: pairing.unpaired_a,
                    unpaired_b: pairing.unpaired_b,
                    metrics,
                })
            })
            .collect::<Result<_, IaaError>>()?;
        let summary = summarize(&per_pair);
        out.insert(
            inventory.clone(),
            InventoryAgreement {
                pairs: per_pair,
                summary,
            },
        );
    }
    Ok(IaaReport { inventories: out })
}

fn summarize(pairs: &[PairAgreement]) -> MetricSummary {
    let n = pairs.len() as f64;
    let mut mean = [0.0; 5];
    for p in pairs {
        for (m, v) in mean.iter_mut().zip(p.metrics.as_array()) {
            *m += v;
        }
    }
    let mean = mean.map(|m| m / n);
    let mut var = [0.0; 5];
    for p in pairs {
        for ((s, v), m) in var.iter_mut().zip(p.metrics.as_array()).zip(mean) {
            *s += (v - m) * (v - m);
        }
    }
    let var = var.map(|s| s / n);
    MetricSummary {
        mean: MetricValues::from_array(mean),
        std: MetricValues::from_array(var.map(f64::sqrt)),
    }
}
