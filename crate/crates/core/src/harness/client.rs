use std::time::{Duration, Instant};

use serde_json::{json, Value};

use super::config::ModelConfig;
use super::HarnessError;

#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    pub text: String,
    pub latency_ms: u64,
    pub prompt_tokens: Option<u64>,
    pub completion_tokens: Option<u64>,
}

/// Client for an OpenAI-compatible chat-completions endpoint.
pub struct HttpModel {
    agent: ureq::Agent,
    url: String,
    model: String,
    temperature: f64,
    max_tokens: Option<u32>,
    reasoning_effort: Option<String>,
    api_key: Option<String>,
    attempts: u32,
    backoff: Duration,
}

impl HttpModel {
    pub fn new(cfg: &ModelConfig) -> Result<Self, HarnessError> {
        let api_key =
            match &cfg.api_key_env {
                Some(var) => Some(std::env::var(var).map_err(|_| {
                    HarnessError::Config(format!("{}: environment variable {var} is not set", cfg.name))
                })?),
                None => None,
            };
        let base = cfg.endpoint.trim_end_matches('/');
        let url =
            if base.ends_with("/chat/completions") { base.to_string() } else { format!("{base}/chat/completions") };
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(cfg.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .new_agent();
        Ok(HttpModel {
            agent,
            url,
            model: cfg.model.clone().unwrap_or_else(|| cfg.name.clone()),
            temperature: cfg.temperature,
            max_tokens: cfg.max_tokens,
            reasoning_effort: cfg.reasoning_effort.clone(),
            api_key,
            attempts: cfg.attempts.max(1),
            backoff: Duration::from_millis(cfg.backoff_ms),
        })
    }

    fn body(&self, prompt: &str) -> Value {
        let mut body = json!({
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.temperature,
        });
        if let Some(t) = self.max_tokens {
            body["max_tokens"] = json!(t);
        }
        if let Some(r) = &self.reasoning_effort {
            body["reasoning_effort"] = json!(r);
        }
        body
    }

    /// Sends one single-turn request. Connection failures, 429 and 5xx are
    /// retried with exponential backoff; any other 4xx is a configuration error.
    pub fn complete(&self, prompt: &str) -> Result<Completion, HarnessError> {
        let body = self.body(prompt);
        log::debug!("request to {}: {body}", self.url);
        let started = Instant::now();
        let mut last = String::new();
        for attempt in 0..self.attempts {
            if attempt > 0 {
                std::thread::sleep(self.backoff * 2u32.pow(attempt - 1));
            }
            let mut req = self.agent.post(&self.url);
            if let Some(key) = &self.api_key {
                req = req.header("Authorization", &format!("Bearer {key}"));
            }
            let mut resp = match req.send_json(&body) {
                Ok(r) => r,
                Err(e) => {
                    last = e.to_string();
                    log::warn!("{}: attempt {} failed: {last}", self.url, attempt + 1);
                    continue;
                }
            };
            let status = resp.status().as_u16();
            let text = resp.body_mut().read_to_string().unwrap_or_default();
            log::debug!("response {status} from {}: {text}", self.url);
            if status == 429 || status >= 500 {
                last = format!("http status {status}");
                log::warn!("{}: attempt {} failed: {last}", self.url, attempt + 1);
                continue;
            }
            if status >= 400 {
                return Err(HarnessError::Config(format!("{} answered {status}: {text}", self.url)));
            }
            let v: Value = serde_json::from_str(&text)
                .map_err(|e| HarnessError::Transport(format!("malformed response body: {e}")))?;
            let content = v["choices"][0]["message"]["content"].as_str().unwrap_or_default().to_string();
            return Ok(Completion {
                text: content,
                latency_ms: started.elapsed().as_millis() as u64,
                prompt_tokens: v["usage"]["prompt_tokens"].as_u64(),
                completion_tokens: v["usage"]["completion_tokens"].as_u64(),
            });
        }
        Err(HarnessError::Transport(format!("{} attempts to {} failed: {last}", self.attempts, self.url)))
    }
}
