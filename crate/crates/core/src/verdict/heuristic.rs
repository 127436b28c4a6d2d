use serde::{Deserialize, Serialize};

use super::{ClassifierError, VeracityClassifier, Verdict};
use crate::corpus::Label;
use crate::evidence::EvidenceSet;
use crate::retrieval::tokenize;

pub const DEFAULT_THRESHOLD: f64 = 0.5;
pub const DEFAULT_NEGATIONS: [&str; 6] = ["not", "no", "never", "none", "cannot", "n't"];

/// Model-free stand-in for a trained veracity classifier.
///
/// Weak evidence (top score below `threshold`) gives NotEnoughInfo. Otherwise
/// the claim is Refuted when exactly one of the claim and the top evidence
/// sentence contains a negation, Supported when neither or both do.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HeuristicClassifier {
    pub threshold: f64,
    pub negations: Vec<String>,
}

impl Default for HeuristicClassifier {
    fn default() -> Self {
        HeuristicClassifier {
            threshold: DEFAULT_THRESHOLD,
            negations: DEFAULT_NEGATIONS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl HeuristicClassifier {
    pub fn has_negation(&self, text: &str) -> bool {
        let tokens = tokenize(text);
        let lower = text.to_lowercase().replace('\u{2019}', "'");
        self.negations.iter().any(|neg| {
            if neg.chars().all(char::is_alphanumeric) {
                tokens.iter().any(|t| t == neg)
            } else {
                // contractions like "n't" never survive tokenization
                lower.contains(neg.as_str())
            }
        })
    }
}

impl VeracityClassifier for HeuristicClassifier {
    fn classify(&self, claim: &str, evidence: &EvidenceSet) -> Result<Verdict, ClassifierError> {
        let Some(top) = evidence.sentences.first() else {
            return Ok(Verdict::not_enough_info());
        };
        if evidence.max_score < self.threshold {
            return Ok(Verdict::not_enough_info());
        }
        let flipped = self.has_negation(claim) != self.has_negation(&top.text);
        Ok(if flipped {
            Verdict {
                label: Label::Refuted,
                probs: [0.1, 0.9, 0.0],
            }
        } else {
            Verdict {
                label: Label::Supported,
                probs: [0.9, 0.1, 0.0],
            }
        })
    }
}
