use serde_json::{json, Value};

use super::{EvidenceScorer, ScorerError};
use crate::remote::{CallError, HttpClient, RemoteConfig};

pub const SCORE_EVIDENCE_PATH: &str = "/score_evidence";
pub const MAX_PAIRS_PER_REQUEST: usize = 64;

const SCORE_FLOOR: f64 = 1e-6;
const SCORE_CEIL: f64 = 1.0 - 1e-6;

/// Client for an external evidence scorer.
///
/// Request: `POST /score_evidence {"pairs": [{"claim", "sentence"}, ...]}`,
/// response `{"scores": [number, ...]}` of the same length. Batches larger than
/// [`MAX_PAIRS_PER_REQUEST`] are split into chunks sent concurrently (up to the
/// in-flight bound, default 4).
pub struct RemoteScorer {
    client: HttpClient,
}

impl RemoteScorer {
    pub fn new(config: RemoteConfig) -> Self {
        RemoteScorer {
            client: HttpClient::new(config, 4),
        }
    }

    fn score_chunk(&self, pairs: &[(&str, &str)]) -> Result<Vec<f64>, ScorerError> {
        let body = json!({
            "pairs": pairs
                .iter()
                .map(|(c, s)| json!({"claim": c, "sentence": s}))
                .collect::<Vec<_>>()
        });
        let response = self
            .client
            .post_json(SCORE_EVIDENCE_PATH, &body)
            .map_err(|e| match e {
                CallError::Transport(m) => ScorerError::Unavailable(m),
                CallError::Protocol(m) => ScorerError::Protocol(m),
            })?;
        parse_scores(&response, pairs.len())
    }
}

pub(crate) fn parse_scores(response: &Value, expected: usize) -> Result<Vec<f64>, ScorerError> {
    let scores = response
        .get("scores")
        .and_then(Value::as_array)
        .ok_or_else(|| ScorerError::Protocol("response has no \"scores\" array".into()))?;
    if scores.len() != expected {
        return Err(ScorerError::Protocol(format!(
            "expected {expected} scores, got {}",
            scores.len()
        )));
    }
    scores
        .iter()
        .map(|v| {
            v.as_f64()
                .filter(|x| x.is_finite())
                .map(|x| x.clamp(SCORE_FLOOR, SCORE_CEIL))
                .ok_or_else(|| ScorerError::Protocol(format!("non-numeric score {v}")))
        })
        .collect()
}

impl EvidenceScorer for RemoteScorer {
    fn score_batch(&self, pairs: &[(&str, &str)]) -> Result<Vec<f64>, ScorerError> {
        if pairs.is_empty() {
            return Ok(Vec::new());
        }
        let chunks: Vec<&[(&str, &str)]> = pairs.chunks(MAX_PAIRS_PER_REQUEST).collect();
        if chunks.len() == 1 {
            return self.score_chunk(chunks[0]);
        }
        let results: Vec<Result<Vec<f64>, ScorerError>> = std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .iter()
                .map(|chunk| scope.spawn(move || self.score_chunk(chunk)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("scorer request thread panicked"))
                .collect()
        });
        let mut out = Vec::with_capacity(pairs.len());
        for r in results {
            out.extend(r?);
        }
        Ok(out)
    }
}
