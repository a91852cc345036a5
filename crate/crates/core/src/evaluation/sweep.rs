use serde::{Deserialize, Serialize};

use super::{evaluate, EvaluationConfig, EvaluationInputs, EvaluationReport};
use crate::model::{InventoryId, SenseInventory};
use crate::wsd::{TsvScorer, WindowSize};

/// One configuration of a sweep: a report, or the reason it failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub scorer: String,
    pub inventory_id: InventoryId,
    pub window: WindowSize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<EvaluationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub cells: Vec<SweepCell>,
}

impl SweepReport {
    pub fn reports(&self) -> impl Iterator<Item = &EvaluationReport> {
        self.cells.iter().filter_map(|c| c.report.as_ref())
    }

    pub fn failures(&self) -> impl Iterator<Item = &SweepCell> {
        self.cells.iter().filter(|c| c.error.is_some())
    }
}

/// Evaluates every scorer x inventory x window combination.
///
/// `base` supplies markup, lemma mode, threshold and function-word handling;
/// its inventory and window are overridden per cell. A failing cell is
/// recorded and the sweep continues.
pub fn sweep(
    inputs: EvaluationInputs<'_>,
    inventories: &[&SenseInventory],
    scorers: &[&dyn TsvScorer],
    windows: &[WindowSize],
    base: &EvaluationConfig,
) -> SweepReport {
    let mut cells = Vec::with_capacity(scorers.len() * inventories.len() * windows.len());
    for scorer in scorers {
        for inventory in inventories {
            for &window in windows {
                let config = EvaluationConfig {
                    inventory_id: inventory.id().clone(),
                    window,
                    ..base.clone()
                };
                let outcome = evaluate(inputs, inventory, *scorer, &config);
                let (report, error) = match outcome {
                    Ok(r) => (Some(r), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                cells.push(SweepCell {
                    scorer: scorer.name(),
                    inventory_id: inventory.id().clone(),
                    window,
                    report,
                    error,
                });
            }
        }
    }
    SweepReport { cells }
}
