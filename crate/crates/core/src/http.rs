//! Minimal JSON-over-HTTP plumbing shared by the remote completion and
//! embedding clients.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

pub const DEFAULT_TIMEOUT_SECS: u64 = 60;

/// Connection settings for a remote model endpoint. The auth token is
/// never stored in configuration: `token_env` names the environment
/// variable that holds it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndpointConfig {
    pub endpoint: String,
    pub model: String,
    pub token_env: Option<String>,
    pub timeout_secs: u64,
}

#[derive(Debug, Error)]
pub enum HttpError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("transport: {0}")]
    Transport(String),
    #[error("unexpected response: {0}")]
    Response(String),
}

/// A configured endpoint with a live connection pool.
pub struct JsonEndpoint {
    config: EndpointConfig,
    token: Option<String>,
    client: reqwest::blocking::Client,
}

impl JsonEndpoint {
    pub fn new(config: EndpointConfig) -> Result<Self, HttpError> {
        if config.endpoint.trim().is_empty() {
            return Err(HttpError::Config("endpoint URL is empty".into()));
        }
        let token = match &config.token_env {
            Some(var) => Some(std::env::var(var).map_err(|_| {
                HttpError::Config(format!("environment variable {var} is not set"))
            })?),
            None => None,
        };
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| HttpError::Config(e.to_string()))?;
        Ok(JsonEndpoint {
            config,
            token,
            client,
        })
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    pub fn post(&self, body: &Value) -> Result<Value, HttpError> {
        let mut req = self.client.post(&self.config.endpoint).json(body);
        if let Some(token) = &self.token {
            req = req.bearer_auth(token);
        }
        let resp = req
            .send()
            .map_err(|e| HttpError::Transport(e.to_string()))?;
        let status = resp.status();
        if !status.is_success() {
            return Err(HttpError::Transport(format!("HTTP status {status}")));
        }
        resp.json().map_err(|e| HttpError::Response(e.to_string()))
    }
}
