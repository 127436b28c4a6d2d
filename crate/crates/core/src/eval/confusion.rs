use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::corpus::Label;
use crate::policy::ClaimOutcome;

/// Gold (rows) by predicted (columns), both in [`Label::ALL`] order.
///
/// `normalized` scales the matrix to sum to 100, so its trace is the accuracy
/// in percent. `n` is the number of claims behind it and is the weight used
/// when aggregating.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 3]; 3],
    pub normalized: [[f64; 3]; 3],
    pub n: u64,
}

impl ConfusionMatrix {
    pub fn from_counts(counts: [[u64; 3]; 3]) -> Result<Self, EvalError> {
        let n: u64 = counts.iter().flatten().sum();
        if n == 0 {
            return Err(EvalError::EmptyEvaluation);
        }
        let normalized = counts.map(|row| row.map(|c| c as f64 * 100.0 / n as f64));
        Ok(ConfusionMatrix {
            counts,
            normalized,
            n,
        })
    }

    /// A matrix known only in normalized form (for example a published table)
    /// over `n` claims. Counts are apportioned by largest remainder so they
    /// sum to `n`; `normalized` is kept as given.
    pub fn from_normalized(normalized: [[f64; 3]; 3], n: u64) -> Result<Self, EvalError> {
        let sum: f64 = normalized.iter().flatten().sum();
        if n == 0 || sum <= 0.0 || normalized.iter().flatten().any(|v| v.is_nan() || *v < 0.0) {
            return Err(EvalError::EmptyEvaluation);
        }
        let exact: Vec<f64> = normalized
            .iter()
            .flatten()
            .map(|v| v / sum * n as f64)
            .collect();
        let mut cells: Vec<u64> = exact.iter().map(|x| x.floor() as u64).collect();
        let mut order: Vec<usize> = (0..9).collect();
        order.sort_by(|&a, &b| {
            let ra = exact[a] - exact[a].floor();
            let rb = exact[b] - exact[b].floor();
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        let short = n - cells.iter().sum::<u64>();
        for &i in order.iter().take(short as usize) {
            cells[i] += 1;
        }
        let mut counts = [[0u64; 3]; 3];
        for (i, c) in cells.into_iter().enumerate() {
            counts[i / 3][i % 3] = c;
        }
        Ok(ConfusionMatrix {
            counts,
            normalized,
            n,
        })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Trace of the normalized matrix: label accuracy in percent.
    pub fn accuracy(&self) -> f64 {
        (0..3).map(|i| self.normalized[i][i]).sum()
    }

    pub fn normalized_sum(&self) -> f64 {
        self.normalized.iter().flatten().sum()
    }
}

/// Tallies gold against predicted labels. Claims without a gold label are
/// skipped.
pub fn confusion(
    outcomes: &[ClaimOutcome],
    golds: &[Option<Label>],
) -> Result<ConfusionMatrix, EvalError> {
    if outcomes.len() != golds.len() {
        return Err(EvalError::LengthMismatch {
            left: outcomes.len(),
            right: golds.len(),
        });
    }
    let mut counts = [[0u64; 3]; 3];
    for (outcome, gold) in outcomes.iter().zip(golds) {
        if let Some(gold) = gold {
            counts[gold.index()][outcome.verdict.label.index()] += 1;
        }
    }
    ConfusionMatrix::from_counts(counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// Each matrix weighs by its claim count: the same as summing raw counts.
    #[default]
    ClaimCount,
    /// Plain cell-wise mean of the normalized matrices.
    Uniform,
}

/// Claim-count weighted mean of the normalized matrices.
pub fn aggregate_matrices(matrices: &[ConfusionMatrix]) -> Result<ConfusionMatrix, EvalError> {
    aggregate_matrices_with(matrices, Weighting::ClaimCount)
}

pub fn aggregate_matrices_with(
    matrices: &[ConfusionMatrix],
    weighting: Weighting,
) -> Result<ConfusionMatrix, EvalError> {
    if matrices.is_empty() {
        return Err(EvalError::EmptyList);
    }
    let weight = |m: &ConfusionMatrix| match weighting {
        Weighting::ClaimCount => m.n as f64,
        Weighting::Uniform => 1.0,
    };
    let total_weight: f64 = matrices.iter().map(weight).sum();
    let mut normalized = [[0.0; 3]; 3];
    let mut counts = [[0u64; 3]; 3];
    for m in matrices {
        let w = weight(m) / total_weight;
        for i in 0..3 {
            for j in 0..3 {
                normalized[i][j] += w * m.normalized[i][j];
                counts[i][j] += m.counts[i][j];
            }
        }
    }
    Ok(ConfusionMatrix {
        counts,
        normalized,
        n: matrices.iter().map(|m| m.n).sum(),
    })
}
