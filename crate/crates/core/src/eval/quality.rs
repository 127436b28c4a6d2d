use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::policy::ClaimOutcome;

/// Mean over claims of the top retrieval score and the top evidence score.
/// Claims with empty retrieval or evidence contribute 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvidenceQualityStats {
    pub mean_max_bm25: f64,
    pub mean_max_e: f64,
}

pub fn quality_stats(outcomes: &[ClaimOutcome]) -> Result<EvidenceQualityStats, EvalError> {
    if outcomes.is_empty() {
        return Err(EvalError::EmptyEvaluation);
    }
    let n = outcomes.len() as f64;
    Ok(EvidenceQualityStats {
        mean_max_bm25: outcomes.iter().map(|o| o.retrieval.max_score).sum::<f64>() / n,
        mean_max_e: outcomes.iter().map(|o| o.evidence.max_score).sum::<f64>() / n,
    })
}
