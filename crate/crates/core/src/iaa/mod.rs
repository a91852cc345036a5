//! Inter-annotator agreement over paired sense scores.
//!
//! Agreement is measured on (token occurrence, sense) items that both
//! annotators of a pair scored in the same inventory. Kappa binarizes scores
//! at the correctness threshold; the weighted kappas use ordinal category
//! ranks; MAE and RMSE use the stored percent values.

mod report;

pub use report::{
    annotator_pairs, iaa_report, pair_scores, IaaReport, InventoryAgreement, MetricSummary,
    MetricValues, PairAgreement, Pairing,
};

use serde::{Deserialize, Serialize};

use crate::model::ScoreCategory;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IaaError {
    #[error("no paired observations")]
    Empty,
    #[error("degenerate marginals: expected disagreement is zero but observed is not")]
    DegenerateMarginals,
    #[error("pair ({a}, {b}) in {inventory}: {source}")]
    Pair {
        a: String,
        b: String,
        inventory: String,
        #[source]
        source: Box<IaaError>,
    },
    #[error("no annotator pairs to report")]
    NoPairs,
}

/// Two annotators' categories for the same items, in item order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairedScores(pub Vec<(ScoreCategory, ScoreCategory)>);

impl PairedScores {
    pub fn new(pairs: Vec<(ScoreCategory, ScoreCategory)>) -> Self {
        Self(pairs)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn swapped(&self) -> Self {
        Self(self.0.iter().map(|&(a, b)| (b, a)).collect())
    }

    fn require_non_empty(&self) -> Result<(), IaaError> {
        if self.is_empty() {
            Err(IaaError::Empty)
        } else {
            Ok(())
        }
    }
}

impl FromIterator<(ScoreCategory, ScoreCategory)> for PairedScores {
    fn from_iter<I: IntoIterator<Item = (ScoreCategory, ScoreCategory)>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// K x K observed co-selection counts with marginals and expected counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub k: usize,
    pub n: u64,
    pub observed: Vec<Vec<u64>>,
    pub row_totals: Vec<u64>,
    pub col_totals: Vec<u64>,
    /// `row_i * col_j / n`
    pub expected: Vec<Vec<f64>>,
}

impl ContingencyTable {
    /// Builds a table from (row, column) category indices in `0..k`.
    pub fn from_indices(k: usize, cells: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut observed = vec![vec![0u64; k]; k];
        for (i, j) in cells {
            observed[i][j] += 1;
        }
        let row_totals: Vec<u64> = observed.iter().map(|r| r.iter().sum()).collect();
        let col_totals: Vec<u64> = (0..k)
            .map(|j| observed.iter().map(|r| r[j]).sum())
            .collect();
        let n: u64 = row_totals.iter().sum();
        let expected = row_totals
            .iter()
            .map(|&r| {
                col_totals
                    .iter()
                    .map(|&c| {
                        if n == 0 {
                            0.0
                        } else {
                            r as f64 * c as f64 / n as f64
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            k,
            n,
            observed,
            row_totals,
            col_totals,
            expected,
        }
    }

    /// The six-category table on ordinal indices.
    pub fn from_scores(pairs: &PairedScores) -> Self {
        Self::from_indices(
            ScoreCategory::COUNT,
            pairs.0.iter().map(|(a, b)| (a.index(), b.index())),
        )
    }

    /// The 2 x 2 table after thresholding at the correctness cut-off.
    pub fn binarized(pairs: &PairedScores) -> Self {
        Self::from_indices(
            2,
            pairs
                .0
                .iter()
                .map(|(a, b)| (usize::from(a.is_correct()), usize::from(b.is_correct()))),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Weighting {
    Linear,
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErrorMetric {
    Mae,
    Rmse,
}

const DEGENERACY_EPS: f64 = 1e-12;

/// Cohen's kappa after binarizing each score at >= 60.
pub fn cohen_kappa_thresholded(pairs: &PairedScores) -> Result<f64, IaaError> {
    pairs.require_non_empty()?;
    let table = ContingencyTable::binarized(pairs);
    let n = table.n as f64;
    let agree = (table.observed[0][0] + table.observed[1][1]) as f64;
    let po = agree / n;
    let pe = table
        .row_totals
        .iter()
        .zip(&table.col_totals)
        .map(|(&r, &c)| r as f64 * c as f64)
        .sum::<f64>()
        / (n * n);
    if (1.0 - pe).abs() < DEGENERACY_EPS {
        return if table.observed[0][1] + table.observed[1][0] == 0 {
            Ok(1.0)
        } else {
            Err(IaaError::DegenerateMarginals)
        };
    }
    Ok((po - pe) / (1.0 - pe))
}

/// Linear or quadratic weighted kappa on ordinal ranks, K = 6.
///
/// The observed weighted disagreement is summed over items; the expected
/// one is derived from the marginals without materialising the K x K
/// expected table (first and second moments for quadratic weights, prefix
/// sums for linear weights).
pub fn weighted_kappa(pairs: &PairedScores, weighting: Weighting) -> Result<f64, IaaError> {
    pairs.require_non_empty()?;
    let k = ScoreCategory::COUNT;
    let mut rows = vec![0u64; k];
    let mut cols = vec![0u64; k];
    let mut observed: u64 = 0;
    for (a, b) in &pairs.0 {
        let (i, j) = (a.index(), b.index());
        rows[i] += 1;
        cols[j] += 1;
        let d = i.abs_diff(j) as u64;
        observed += match weighting {
            Weighting::Linear => d,
            Weighting::Quadratic => d * d,
        };
    }
    let n = pairs.len() as f64;
    // n * sum_ij w_ij * r_i * c_j, kept integral until the final division.
    let expected_times_n: u128 = match weighting {
        Weighting::Quadratic => {
            let moment = |m: &[u64], p: u32| -> u128 {
                m.iter()
                    .enumerate()
                    .map(|(i, &c)| c as u128 * (i as u128).pow(p))
                    .sum()
            };
            let (r1, r2) = (moment(&rows, 1), moment(&rows, 2));
            let (c1, c2) = (moment(&cols, 1), moment(&cols, 2));
            let total = pairs.len() as u128;
            // sum_ij (i-j)^2 r_i c_j = N*r2 + N*c2 - 2*r1*c1
            total * r2 + total * c2 - 2 * r1 * c1
        }
        Weighting::Linear => {
            // sum_i r_i * sum_j |i-j| c_j via prefix counts and prefix index sums
            let mut below_count = 0u128;
            let mut below_sum = 0u128;
            let total_count: u128 = cols.iter().map(|&c| c as u128).sum();
            let total_sum: u128 = cols
                .iter()
                .enumerate()
                .map(|(j, &c)| j as u128 * c as u128)
                .sum();
            let mut acc = 0u128;
            for i in 0..k {
                let ii = i as u128;
                let above_count = total_count - below_count;
                let above_sum = total_sum - below_sum;
                let dist = ii * below_count - below_sum + (above_sum - ii * above_count);
                acc += rows[i] as u128 * dist;
                below_count += cols[i] as u128;
                below_sum += ii * cols[i] as u128;
            }
            acc
        }
    };
    let norm = match weighting {
        Weighting::Linear => (k - 1) as f64,
        Weighting::Quadratic => ((k - 1) * (k - 1)) as f64,
    };
    let numerator = observed as f64 / norm;
    let denominator = expected_times_n as f64 / n / norm;
    if denominator.abs() < DEGENERACY_EPS {
        return if observed == 0 {
            Ok(1.0)
        } else {
            Err(IaaError::DegenerateMarginals)
        };
    }
    Ok(1.0 - numerator / denominator)
}

/// MAE or RMSE on the percent values (1..=100).
pub fn score_error(pairs: &PairedScores, metric: ErrorMetric) -> Result<f64, IaaError> {
    pairs.require_non_empty()?;
    let n = pairs.len() as f64;
    let diffs = pairs
        .0
        .iter()
        .map(|(a, b)| f64::from(a.value()) - f64::from(b.value()));
    Ok(match metric {
        ErrorMetric::Mae => diffs.map(f64::abs).sum::<f64>() / n,
        ErrorMetric::Rmse => (diffs.map(|d| d * d).sum::<f64>() / n).sqrt(),
    })
}

#[cfg(test)]
mod tests;
