//! Completion clients: the trait, a fixture-backed mock and an HTTP client
//! for OpenAI-compatible chat completion endpoints.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{build_prompt, Post, PromptError};
use crate::http::{EndpointConfig, HttpError, JsonEndpoint};
use crate::ontology::Ontology;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("no canned response for prompt {0}")]
    NoFixture(String),
    #[error("completion transport failure: {0}")]
    Transport(String),
    #[error("fixture error: {0}")]
    Fixture(String),
    #[error(transparent)]
    Http(#[from] HttpError),
}

/// A text completion backend. Implementations must tolerate concurrent
/// calls.
pub trait CompletionClient: Send + Sync {
    fn model_id(&self) -> &str;
    fn complete(&self, prompt: &str) -> Result<String, ClientError>;
}

/// Hex SHA-256 of a prompt; the lookup key for canned responses.
pub fn prompt_sha256(prompt: &str) -> String {
    hex::encode(Sha256::digest(prompt.as_bytes()))
}

/// One line of a canned-response fixture file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureEntry {
    pub prompt_sha256: String,
    /// Informational only; lookup is by prompt hash.
    #[serde(default)]
    pub post_id: Option<String>,
    /// Returned in order on successive calls; the last one repeats.
    pub responses: Vec<String>,
}

/// Deterministic client answering from canned responses keyed by prompt
/// hash.
///
/// Each prompt has its own cursor, so the sequence a post sees does not
/// depend on how posts are scheduled across threads.
pub struct MockCompletionClient {
    model_id: String,
    responses: HashMap<String, Vec<String>>,
    cursors: Mutex<HashMap<String, usize>>,
}

impl MockCompletionClient {
    pub fn new(entries: Vec<FixtureEntry>) -> Result<Self, ClientError> {
        let mut responses = HashMap::new();
        for e in entries {
            if e.responses.is_empty() {
                return Err(ClientError::Fixture(format!(
                    "entry {} has no responses",
                    e.prompt_sha256
                )));
            }
            if responses
                .insert(e.prompt_sha256.clone(), e.responses)
                .is_some()
            {
                return Err(ClientError::Fixture(format!(
                    "duplicate entry for {}",
                    e.prompt_sha256
                )));
            }
        }
        Ok(MockCompletionClient {
            model_id: "mock".to_string(),
            responses,
            cursors: Mutex::new(HashMap::new()),
        })
    }

    /// Loads every `*.jsonl` file in `dir`, in file name order.
    pub fn from_dir(dir: &Path) -> Result<Self, ClientError> {
        let read_err = |e: std::io::Error| ClientError::Fixture(format!("{}: {e}", dir.display()));
        let mut files: Vec<_> = std::fs::read_dir(dir)
            .map_err(read_err)?
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
            .collect();
        files.sort();
        let mut entries = Vec::new();
        for f in files {
            let text = std::fs::read_to_string(&f).map_err(read_err)?;
            let mut parsed: Vec<FixtureEntry> = super::parse_jsonl(&text)
                .map_err(|e| ClientError::Fixture(format!("{}: {e}", f.display())))?;
            entries.append(&mut parsed);
        }
        MockCompletionClient::new(entries)
    }

    pub fn with_model_id(mut self, id: impl Into<String>) -> Self {
        self.model_id = id.into();
        self
    }
}

impl CompletionClient for MockCompletionClient {
    fn model_id(&self) -> &str {
        &self.model_id
    }

    fn complete(&self, prompt: &str) -> Result<String, ClientError> {
        let key = prompt_sha256(prompt);
        let seq = self
            .responses
            .get(&key)
            .ok_or_else(|| ClientError::NoFixture(key.clone()))?;
        let mut cursors = self.cursors.lock().expect("cursor lock");
        let cursor = cursors.entry(key).or_insert(0);
        let out = seq[(*cursor).min(seq.len() - 1)].clone();
        *cursor += 1;
        Ok(out)
    }
}

/// Builds hash-keyed fixture entries from responses recorded per post id.
/// Posts without recorded responses are skipped.
pub fn pack_fixtures(
    o: &Ontology,
    posts: &[Post],
    responses_by_post: &HashMap<String, Vec<String>>,
) -> Result<Vec<FixtureEntry>, PromptError> {
    let mut out = Vec::new();
    for post in posts {
        if let Some(responses) = responses_by_post.get(&post.id) {
            let prompt = build_prompt(o, &post.text)?;
            out.push(FixtureEntry {
                prompt_sha256: prompt_sha256(&prompt),
                post_id: Some(post.id.clone()),
                responses: responses.clone(),
            });
        }
    }
    Ok(out)
}

pub type HttpClientConfig = EndpointConfig;

/// Client for chat completion endpoints speaking the OpenAI wire format:
/// a single user message in, `choices[0].message.content` out.
pub struct HttpCompletionClient {
    endpoint: JsonEndpoint,
}

impl HttpCompletionClient {
    pub fn new(config: HttpClientConfig) -> Result<Self, ClientError> {
        Ok(HttpCompletionClient {
            endpoint: JsonEndpoint::new(config)?,
        })
    }
}

impl CompletionClient for HttpCompletionClient {
    fn model_id(&self) -> &str {
        &self.endpoint.config().model
    }

    fn complete(&self, prompt: &str) -> Result<String, ClientError> {
        let body = json!({
            "model": self.endpoint.config().model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        });
        let resp = self.endpoint.post(&body)?;
        resp.pointer("/choices/0/message/content")
            .and_then(|v| v.as_str())
            .map(str::to_string)
            .ok_or_else(|| {
                ClientError::Http(HttpError::Response(
                    "missing choices[0].message.content".into(),
                ))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mock_replays_sequence_then_repeats_last() {
        let key = prompt_sha256("p");
        let client = MockCompletionClient::new(vec![FixtureEntry {
            prompt_sha256: key,
            post_id: None,
            responses: vec!["a".into(), "b".into()],
        }])
        .unwrap();
        let got: Vec<String> = (0..3).map(|_| client.complete("p").unwrap()).collect();
        assert_eq!(got, ["a", "b", "b"]);
        assert!(matches!(
            client.complete("q"),
            Err(ClientError::NoFixture(_))
        ));
    }

    #[test]
    fn mock_rejects_empty_and_duplicate_entries() {
        let e = |r: Vec<String>| FixtureEntry {
            prompt_sha256: "k".into(),
            post_id: None,
            responses: r,
        };
        assert!(MockCompletionClient::new(vec![e(vec![])]).is_err());
        assert!(MockCompletionClient::new(vec![e(vec!["x".into()]), e(vec!["y".into()])]).is_err());
    }

    #[test]
    fn missing_token_env_is_config_error() {
        let cfg = HttpClientConfig {
            endpoint: "http://127.0.0.1:9".into(),
            model: "m".into(),
            token_env: Some("MESO_TEST_SURELY_UNSET_TOKEN".into()),
            timeout_secs: 1,
        };
        assert!(matches!(
            HttpCompletionClient::new(cfg),
            Err(ClientError::Http(HttpError::Config(_)))
        ));
    }
}
