//! Veracity prediction from a claim and its selected evidence.

mod heuristic;
mod remote;

pub use heuristic::{HeuristicClassifier, DEFAULT_NEGATIONS, DEFAULT_THRESHOLD};
pub use remote::{RemoteClassifier, CLASSIFY_VERDICT_PATH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Claim, Label};
use crate::evidence::EvidenceSet;

pub const DEFAULT_SEPARATOR: &str = " </s> ";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifierError {
    #[error("classifier unavailable: {0}")]
    Unavailable(String),
    #[error("classifier protocol error: {0}")]
    Protocol(String),
}

/// A predicted label with probabilities in `Supported, Refuted, NotEnoughInfo` order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub label: Label,
    pub probs: [f64; 3],
}

impl Verdict {
    /// Validates `probs` and takes the argmax, preferring Supported over
    /// Refuted over NotEnoughInfo on ties.
    pub fn from_probs(probs: [f64; 3]) -> Result<Self, ClassifierError> {
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(ClassifierError::Protocol(format!(
                "probabilities {probs:?} outside [0, 1]"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(ClassifierError::Protocol(format!(
                "probabilities {probs:?} sum to {sum}"
            )));
        }
        let mut best = 0;
        for i in 1..3 {
            if probs[i] > probs[best] {
                best = i;
            }
        }
        Ok(Verdict {
            label: Label::ALL[best],
            probs,
        })
    }

    pub fn not_enough_info() -> Self {
        Verdict {
            label: Label::NotEnoughInfo,
            probs: [0.0, 0.0, 1.0],
        }
    }
}

pub trait VeracityClassifier: Send + Sync {
    fn classify(&self, claim: &str, evidence: &EvidenceSet) -> Result<Verdict, ClassifierError>;
}

pub fn classify(
    classifier: &dyn VeracityClassifier,
    claim: &Claim,
    evidence: &EvidenceSet,
) -> Result<Verdict, ClassifierError> {
    classifier.classify(&claim.text, evidence)
}

/// Claim followed by each evidence sentence, joined by `separator`.
pub fn build_input(claim: &Claim, evidence: &EvidenceSet, separator: &str) -> String {
    let mut out = claim.text.clone();
    for s in &evidence.sentences {
        out.push_str(separator);
        out.push_str(&s.text);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evidence::EvidenceSentence;

    fn evidence(texts: &[&str]) -> EvidenceSet {
        EvidenceSet {
            claim_id: "c".into(),
            sentences: texts
                .iter()
                .enumerate()
                .map(|(i, t)| EvidenceSentence {
                    kb: None,
                    doc_id: "d".into(),
                    sentence_index: i,
                    text: t.to_string(),
                    score: 0.5,
                })
                .collect(),
            max_score: if texts.is_empty() { 0.0 } else { 0.5 },
        }
    }

    #[test]
    fn input_concatenation() {
        let claim = Claim::new("c", "A", None);
        assert_eq!(
            build_input(&claim, &evidence(&["B", "C"]), DEFAULT_SEPARATOR),
            "A </s> B </s> C"
        );
        assert_eq!(build_input(&claim, &evidence(&[]), DEFAULT_SEPARATOR), "A");
        let five = build_input(
            &claim,
            &evidence(&["1", "2", "3", "4", "5"]),
            DEFAULT_SEPARATOR,
        );
        assert_eq!(five.matches(DEFAULT_SEPARATOR).count(), 5);
    }

    #[test]
    fn argmax_and_ties() {
        assert_eq!(
            Verdict::from_probs([0.2, 0.2, 0.6]).unwrap().label,
            Label::NotEnoughInfo
        );
        assert_eq!(
            Verdict::from_probs([0.5, 0.5, 0.0]).unwrap().label,
            Label::Supported
        );
        assert_eq!(
            Verdict::from_probs([0.0, 0.5, 0.5]).unwrap().label,
            Label::Refuted
        );
    }

    #[test]
    fn invalid_probabilities() {
        assert!(Verdict::from_probs([0.5, 0.5, 0.5]).is_err());
        assert!(Verdict::from_probs([-0.1, 0.6, 0.5]).is_err());
        assert!(Verdict::from_probs([f64::NAN, 0.5, 0.5]).is_err());
    }
}
