use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{rank_scored, RetrievalError, RetrievalResult, Retriever};
use crate::corpus::{Claim, Document, RetrieverKind};
use crate::remote::{CallError, HttpClient, RemoteConfig};

/// Live search-engine retriever. Off unless a KB is configured with
/// `kind: "web_search"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WebSearchConfig {
    #[serde(flatten)]
    pub remote: RemoteConfig,
    /// Hits requested per query.
    #[serde(default = "default_hits")]
    pub hits: usize,
}

fn default_hits() -> usize {
    RetrieverKind::WebSearch.default_k()
}

/// Sends `GET <endpoint>?q=<claim>&num=<k>[&key=<api key>]` and reads a
/// search-API style body `{"items": [{"link", "title", "snippet"}, ...]}`.
/// Each snippet becomes one document whose id is the hit's link.
pub struct WebSearchRetriever {
    client: HttpClient,
    hits: usize,
}

impl WebSearchRetriever {
    pub fn new(config: WebSearchConfig) -> Self {
        WebSearchRetriever {
            client: HttpClient::new(config.remote, 2),
            hits: config.hits,
        }
    }

    fn parse(body: &Value) -> Vec<Document> {
        let Some(items) = body.get("items").and_then(Value::as_array) else {
            return Vec::new();
        };
        items
            .iter()
            .enumerate()
            .filter_map(|(i, item)| {
                let text = item.get("snippet")?.as_str()?;
                let id = item
                    .get("link")
                    .and_then(Value::as_str)
                    .map_or_else(|| format!("hit-{i}"), str::to_string);
                let title = item
                    .get("title")
                    .and_then(Value::as_str)
                    .map(str::to_string);
                Document::new(id, title, text).ok()
            })
            .collect()
    }
}

impl Retriever for WebSearchRetriever {
    fn kind(&self) -> RetrieverKind {
        RetrieverKind::WebSearch
    }

    fn retrieve(
        &self,
        claim: &Claim,
        k: usize,
    ) -> Result<(RetrievalResult, Vec<Document>), RetrievalError> {
        let k = k.min(self.hits.max(1));
        let body = self
            .client
            .get_json(&[("q", claim.text.clone()), ("num", k.to_string())])
            .map_err(|e| match e {
                CallError::Transport(m) | CallError::Protocol(m) => {
                    RetrievalError::RetrieverUnavailable(format!(
                        "{}: {m}",
                        self.client.config().endpoint
                    ))
                }
            })?;
        Ok(rank_scored(Self::parse(&body), k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_search_items() {
        let body = serde_json::json!({
            "items": [
                {"link": "https://a.example", "title": "A", "snippet": "Snippet one."},
                {"link": "https://b.example", "snippet": ""},
                {"title": "C", "snippet": "Snippet three."}
            ]
        });
        let docs = WebSearchRetriever::parse(&body);
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].id, "https://a.example");
        assert_eq!(docs[1].id, "hit-2");
        assert!(WebSearchRetriever::parse(&serde_json::json!({})).is_empty());
    }
}
