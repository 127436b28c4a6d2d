use serde_json::{json, Value};

use super::{ClassifierError, VeracityClassifier, Verdict};
use crate::corpus::Label;
use crate::evidence::EvidenceSet;
use crate::remote::{CallError, HttpClient, RemoteConfig};

pub const CLASSIFY_VERDICT_PATH: &str = "/classify_verdict";

/// Client for an external veracity classifier.
///
/// Request: `POST /classify_verdict {"items": [{"claim", "evidence": [...]}]}`,
/// response `{"verdicts": [{"label", "probs": [s, r, n]}]}`. The returned label
/// must parse, but the verdict label is always recomputed from `probs` with the
/// Supported > Refuted > NotEnoughInfo tie order.
pub struct RemoteClassifier {
    client: HttpClient,
}

impl RemoteClassifier {
    pub fn new(config: RemoteConfig) -> Self {
        RemoteClassifier {
            client: HttpClient::new(config, 4),
        }
    }

    pub fn classify_batch(
        &self,
        items: &[(&str, &EvidenceSet)],
    ) -> Result<Vec<Verdict>, ClassifierError> {
        if items.is_empty() {
            return Ok(Vec::new());
        }
        let body = json!({
            "items": items
                .iter()
                .map(|(claim, ev)| json!({"claim": claim, "evidence": ev.texts()}))
                .collect::<Vec<_>>()
        });
        let response = self
            .client
            .post_json(CLASSIFY_VERDICT_PATH, &body)
            .map_err(|e| match e {
                CallError::Transport(m) => ClassifierError::Unavailable(m),
                CallError::Protocol(m) => ClassifierError::Protocol(m),
            })?;
        parse_verdicts(&response, items.len())
    }
}

pub(crate) fn parse_verdicts(
    response: &Value,
    expected: usize,
) -> Result<Vec<Verdict>, ClassifierError> {
    let protocol = |m: String| ClassifierError::Protocol(m);
    let verdicts = response
        .get("verdicts")
        .and_then(Value::as_array)
        .ok_or_else(|| protocol("response has no \"verdicts\" array".into()))?;
    if verdicts.len() != expected {
        return Err(protocol(format!(
            "expected {expected} verdicts, got {}",
            verdicts.len()
        )));
    }
    verdicts
        .iter()
        .map(|v| {
            let label = v
                .get("label")
                .and_then(Value::as_str)
                .ok_or_else(|| protocol(format!("verdict without label: {v}")))?;
            label
                .parse::<Label>()
                .map_err(|l| protocol(format!("unknown label {l:?}")))?;
            let probs = v
                .get("probs")
                .and_then(Value::as_array)
                .filter(|p| p.len() == 3)
                .ok_or_else(|| protocol(format!("verdict needs three probs: {v}")))?;
            let mut out = [0.0; 3];
            for (slot, p) in out.iter_mut().zip(probs) {
                *slot = p
                    .as_f64()
                    .ok_or_else(|| protocol(format!("non-numeric probability {p}")))?;
            }
            Verdict::from_probs(out)
        })
        .collect()
}

impl VeracityClassifier for RemoteClassifier {
    fn classify(&self, claim: &str, evidence: &EvidenceSet) -> Result<Verdict, ClassifierError> {
        let mut out = self.classify_batch(&[(claim, evidence)])?;
        Ok(out.remove(0))
    }
}
