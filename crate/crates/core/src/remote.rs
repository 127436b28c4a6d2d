//! Shared HTTP plumbing for the remote scorer, classifier and web retriever:
//! bounded in-flight requests plus retry with exponential backoff.

use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RemoteConfig {
    /// Base URL, e.g. `http://127.0.0.1:8080`.
    pub endpoint: String,
    /// Concurrent request bound; each client has its own default.
    pub max_in_flight: Option<usize>,
    pub retries: u32,
    pub backoff_ms: u64,
    pub timeout_ms: u64,
    /// Name of an environment variable holding an API key, if the service needs one.
    pub api_key_env: Option<String>,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        RemoteConfig {
            endpoint: String::new(),
            max_in_flight: None,
            retries: 3,
            backoff_ms: 200,
            timeout_ms: 30_000,
            api_key_env: None,
        }
    }
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        RemoteConfig {
            endpoint: endpoint.into(),
            ..Default::default()
        }
    }
}

#[derive(Debug)]
pub(crate) enum CallError {
    /// Connection failures and non-200 responses, after all retries.
    Transport(String),
    /// The server answered 200 but the body was not JSON.
    Protocol(String),
}

/// Counting semaphore bounding concurrent requests.
pub(crate) struct Gate {
    free: Mutex<usize>,
    cv: Condvar,
}

pub(crate) struct Permit<'a>(&'a Gate);

impl Gate {
    pub(crate) fn new(permits: usize) -> Self {
        Gate {
            free: Mutex::new(permits.max(1)),
            cv: Condvar::new(),
        }
    }

    pub(crate) fn acquire(&self) -> Permit<'_> {
        let mut free = self.free.lock().unwrap();
        while *free == 0 {
            free = self.cv.wait(free).unwrap();
        }
        *free -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap() += 1;
        self.0.cv.notify_one();
    }
}

pub(crate) struct HttpClient {
    config: RemoteConfig,
    agent: ureq::Agent,
    gate: Gate,
}

impl HttpClient {
    pub(crate) fn new(config: RemoteConfig, default_in_flight: usize) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(config.timeout_ms)))
            .http_status_as_error(false)
            .build()
            .into();
        let gate = Gate::new(config.max_in_flight.unwrap_or(default_in_flight));
        HttpClient {
            config,
            agent,
            gate,
        }
    }

    pub(crate) fn config(&self) -> &RemoteConfig {
        &self.config
    }

    fn url(&self, path: &str) -> String {
        format!("{}{}", self.config.endpoint.trim_end_matches('/'), path)
    }

    fn api_key(&self) -> Option<String> {
        self.config
            .api_key_env
            .as_ref()
            .and_then(|var| std::env::var(var).ok())
    }

    pub(crate) fn post_json(&self, path: &str, body: &Value) -> Result<Value, CallError> {
        let url = self.url(path);
        self.with_retries(|| {
            let mut req = self.agent.post(&url);
            if let Some(key) = self.api_key() {
                req = req.header("Authorization", &format!("Bearer {key}"));
            }
            req.send_json(body)
        })
    }

    /// GET with query parameters; the API key, when configured, goes in `key`.
    pub(crate) fn get_json(&self, query: &[(&str, String)]) -> Result<Value, CallError> {
        let url = self.config.endpoint.clone();
        self.with_retries(|| {
            let mut req = self.agent.get(&url);
            for (k, v) in query {
                req = req.query(*k, v);
            }
            if let Some(key) = self.api_key() {
                req = req.query("key", &key);
            }
            req.call()
        })
    }

    fn with_retries<F>(&self, send: F) -> Result<Value, CallError>
    where
        F: Fn() -> Result<ureq::http::Response<ureq::Body>, ureq::Error>,
    {
        let _permit = self.gate.acquire();
        let mut last = String::new();
        for attempt in 0..=self.config.retries {
            if attempt > 0 {
                let delay = self
                    .config
                    .backoff_ms
                    .saturating_mul(1 << (attempt - 1).min(16));
                std::thread::sleep(Duration::from_millis(delay));
            }
            match send() {
                Ok(mut resp) if resp.status().as_u16() == 200 => {
                    let text = resp
                        .body_mut()
                        .read_to_string()
                        .map_err(|e| CallError::Transport(e.to_string()))?;
                    return serde_json::from_str(&text)
                        .map_err(|e| CallError::Protocol(format!("invalid JSON body: {e}")));
                }
                Ok(resp) => last = format!("HTTP status {}", resp.status().as_u16()),
                Err(e) => last = e.to_string(),
            }
            log::warn!(
                "request to {} failed (attempt {}): {last}",
                self.config.endpoint,
                attempt + 1
            );
        }
        Err(CallError::Transport(last))
    }
}
