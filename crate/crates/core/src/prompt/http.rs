use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::provider::{CompletionProvider, ProviderError};
use super::request::PromptRequest;
use super::template::ChatMessage;

/// Connection settings for a chat-completions endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProviderConfig {
    pub base_url: String,
    pub model_name: String,
    /// Name of the environment variable holding the bearer token.
    pub api_key_env: String,
    pub timeout_secs: f64,
    pub max_retries: u32,
    pub max_concurrent_requests: usize,
    pub temperature: f64,
    /// First backoff delay; doubles on every retry, plus up to 100% jitter.
    pub backoff_ms: u64,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        Self {
            base_url: "https://api.openai.com/v1".into(),
            model_name: "gpt-4".into(),
            api_key_env: "OPENAI_API_KEY".into(),
            timeout_secs: 60.0,
            max_retries: 2,
            max_concurrent_requests: 4,
            temperature: 0.0,
            backoff_ms: 500,
        }
    }
}

impl ProviderConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.max_concurrent_requests < 1 {
            return Err("max_concurrent_requests must be at least 1".into());
        }
        if !(self.timeout_secs.is_finite() && self.timeout_secs > 0.0) {
            return Err("timeout_secs must be positive".into());
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err("temperature must lie in [0, 2]".into());
        }
        if self.base_url.trim().is_empty() {
            return Err("base_url is empty".into());
        }
        Ok(())
    }
}

/// Counting semaphore bounding in-flight requests.
#[derive(Debug)]
pub struct RequestSlots {
    max: usize,
    in_use: Mutex<usize>,
    freed: Condvar,
}

pub struct SlotGuard<'a>(&'a RequestSlots);

impl RequestSlots {
    pub fn new(max: usize) -> Self {
        Self {
            max: max.max(1),
            in_use: Mutex::new(0),
            freed: Condvar::new(),
        }
    }

    pub fn acquire(&self) -> SlotGuard<'_> {
        let mut n = self.in_use.lock().expect("slot lock");
        while *n >= self.max {
            n = self.freed.wait(n).expect("slot lock");
        }
        *n += 1;
        SlotGuard(self)
    }

    pub fn in_use(&self) -> usize {
        *self.in_use.lock().expect("slot lock")
    }
}

impl Drop for SlotGuard<'_> {
    fn drop(&mut self) {
        let mut n = self.0.in_use.lock().expect("slot lock");
        *n -= 1;
        self.0.freed.notify_one();
    }
}

/// Chat-completions client: POST `{base_url}/chat/completions`.
pub struct HttpProvider {
    cfg: ProviderConfig,
    api_key: String,
    client: reqwest::blocking::Client,
    slots: RequestSlots,
}

impl HttpProvider {
    /// Reads the API key from `cfg.api_key_env`.
    pub fn from_env(cfg: ProviderConfig) -> Result<Self, ProviderError> {
        let key = std::env::var(&cfg.api_key_env).map_err(|_| {
            ProviderError::Auth(format!("environment variable {} is not set", cfg.api_key_env))
        })?;
        Self::new(cfg, key)
    }

    pub fn new(cfg: ProviderConfig, api_key: String) -> Result<Self, ProviderError> {
        cfg.validate().map_err(ProviderError::Config)?;
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs_f64(cfg.timeout_secs))
            .build()
            .map_err(|e| ProviderError::Config(e.to_string()))?;
        Ok(Self {
            slots: RequestSlots::new(cfg.max_concurrent_requests),
            cfg,
            api_key,
            client,
        })
    }

    fn endpoint(&self) -> String {
        format!("{}/chat/completions", self.cfg.base_url.trim_end_matches('/'))
    }

    fn backoff(&self, attempt: u32) -> Duration {
        let base = self.cfg.backoff_ms.saturating_mul(1u64 << attempt.min(16));
        let jitter = (rand::random::<f64>() * base as f64) as u64;
        Duration::from_millis(base + jitter)
    }

    fn send_once(&self, body: &Value) -> Result<String, Attempt> {
        let _slot = self.slots.acquire();
        let resp = self
            .client
            .post(self.endpoint())
            .bearer_auth(&self.api_key)
            .json(body)
            .send()
            .map_err(|e| Attempt::Retry(e.to_string()))?;
        let status = resp.status();
        let text = resp.text().map_err(|e| Attempt::Retry(e.to_string()))?;
        if status.as_u16() == 429 || status.is_server_error() {
            return Err(Attempt::Retry(format!("HTTP {status}")));
        }
        if status.as_u16() == 401 || status.as_u16() == 403 {
            return Err(Attempt::Fatal(ProviderError::Auth(format!("HTTP {status}"))));
        }
        if !status.is_success() {
            return Err(Attempt::Fatal(ProviderError::Transport(format!("HTTP {status}: {text}"))));
        }
        let parsed: Value = serde_json::from_str(&text).map_err(|e| {
            Attempt::Fatal(ProviderError::Transport(format!("malformed completion body: {e}")))
        })?;
        parsed
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| {
                Attempt::Fatal(ProviderError::Transport(
                    "completion body has no choices[0].message.content".into(),
                ))
            })
    }
}

enum Attempt {
    Retry(String),
    Fatal(ProviderError),
}

impl CompletionProvider for HttpProvider {
    fn name(&self) -> &str {
        "http"
    }

    fn complete(&self, _: &PromptRequest, messages: &[ChatMessage]) -> Result<String, ProviderError> {
        let body = json!({
            "model": self.cfg.model_name,
            "messages": messages,
            "temperature": self.cfg.temperature,
        });
        let mut last = String::new();
        for attempt in 0..=self.cfg.max_retries {
            if attempt > 0 {
                std::thread::sleep(self.backoff(attempt - 1));
            }
            match self.send_once(&body) {
                Ok(content) => return Ok(content),
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(Attempt::Retry(msg)) => {
                    tracing::warn!(attempt, "chat completion failed: {msg}");
                    last = msg;
                }
            }
        }
        Err(ProviderError::Transport(format!(
            "giving up after {} attempts: {last}",
            self.cfg.max_retries + 1
        )))
    }
}
