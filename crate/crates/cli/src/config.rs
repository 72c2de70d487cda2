//! Effective configuration: built-in defaults, then the config file, then
//! command-line flags.
//!
//! The file is a flat list of `key = "value"` lines (TOML syntax; integer
//! values may be quoted or bare). Recognized keys are the field names of
//! [`Config`].

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use meso_core::http::{EndpointConfig, DEFAULT_TIMEOUT_SECS};
use serde::Serialize;

pub const DEFAULT_CONFIG_FILE: &str = "meso.toml";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Config {
    pub llm_endpoint: String,
    pub llm_model: String,
    pub llm_token_env: String,
    pub llm_timeout_secs: u64,
    pub parallelism: usize,
    pub retries: usize,
    pub embed_endpoint: String,
    pub embed_model: String,
    pub embed_token_env: String,
    pub embed_timeout_secs: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            llm_endpoint: String::new(),
            llm_model: String::new(),
            llm_token_env: String::new(),
            llm_timeout_secs: DEFAULT_TIMEOUT_SECS,
            parallelism: 4,
            retries: meso_core::extraction::DEFAULT_RETRIES,
            embed_endpoint: String::new(),
            embed_model: String::new(),
            embed_token_env: String::new(),
            embed_timeout_secs: DEFAULT_TIMEOUT_SECS,
        }
    }
}

/// Flag values; `None` leaves the lower layer in place.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Chat completion endpoint URL
    #[arg(long, global = true)]
    pub llm_endpoint: Option<String>,
    /// Chat model name
    #[arg(long, global = true)]
    pub llm_model: Option<String>,
    /// Environment variable holding the LLM bearer token
    #[arg(long, global = true)]
    pub llm_token_env: Option<String>,
    /// LLM request timeout in seconds
    #[arg(long, global = true)]
    pub llm_timeout_secs: Option<u64>,
    /// Concurrent LLM calls during extraction
    #[arg(long, global = true)]
    pub parallelism: Option<usize>,
    /// Retries for malformed model output
    #[arg(long, global = true)]
    pub retries: Option<usize>,
    /// Embedding endpoint URL
    #[arg(long, global = true)]
    pub embed_endpoint: Option<String>,
    /// Embedding model name
    #[arg(long, global = true)]
    pub embed_model: Option<String>,
    /// Environment variable holding the embedding bearer token
    #[arg(long, global = true)]
    pub embed_token_env: Option<String>,
    /// Embedding request timeout in seconds
    #[arg(long, global = true)]
    pub embed_timeout_secs: Option<u64>,
}

fn as_text(key: &str, v: &toml::Value) -> Result<String> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        other => bail!(
            "config key {key}: expected a string, found {}",
            other.type_str()
        ),
    }
}

fn as_number<T: std::str::FromStr>(key: &str, v: &toml::Value) -> Result<T> {
    let text = as_text(key, v)?;
    text.trim()
        .parse()
        .map_err(|_| anyhow::anyhow!("config key {key}: {text:?} is not a non-negative integer"))
}

impl Config {
    /// Applies `key = "value"` lines from `text`.
    pub fn apply_file_text(&mut self, text: &str) -> Result<()> {
        let table: toml::Table = text
            .parse()
            .context("config file is not flat key = \"value\" lines")?;
        for (key, v) in &table {
            match key.as_str() {
                "llm_endpoint" => self.llm_endpoint = as_text(key, v)?,
                "llm_model" => self.llm_model = as_text(key, v)?,
                "llm_token_env" => self.llm_token_env = as_text(key, v)?,
                "llm_timeout_secs" => self.llm_timeout_secs = as_number(key, v)?,
                "parallelism" => self.parallelism = as_number(key, v)?,
                "retries" => self.retries = as_number(key, v)?,
                "embed_endpoint" => self.embed_endpoint = as_text(key, v)?,
                "embed_model" => self.embed_model = as_text(key, v)?,
                "embed_token_env" => self.embed_token_env = as_text(key, v)?,
                "embed_timeout_secs" => self.embed_timeout_secs = as_number(key, v)?,
                other => bail!("unknown config key {other:?}"),
            }
        }
        Ok(())
    }

    pub fn apply_overrides(&mut self, o: &Overrides) {
        fn set<T: Clone>(dst: &mut T, src: &Option<T>) {
            if let Some(v) = src {
                *dst = v.clone();
            }
        }
        set(&mut self.llm_endpoint, &o.llm_endpoint);
        set(&mut self.llm_model, &o.llm_model);
        set(&mut self.llm_token_env, &o.llm_token_env);
        set(&mut self.llm_timeout_secs, &o.llm_timeout_secs);
        set(&mut self.parallelism, &o.parallelism);
        set(&mut self.retries, &o.retries);
        set(&mut self.embed_endpoint, &o.embed_endpoint);
        set(&mut self.embed_model, &o.embed_model);
        set(&mut self.embed_token_env, &o.embed_token_env);
        set(&mut self.embed_timeout_secs, &o.embed_timeout_secs);
    }

    /// Defaults, then `path` (or `./meso.toml` when present), then flags.
    pub fn resolve(path: Option<&Path>, overrides: &Overrides) -> Result<(Self, Option<PathBuf>)> {
        let mut cfg = Config::default();
        let file = match path {
            Some(p) => Some(p.to_path_buf()),
            None => Some(PathBuf::from(DEFAULT_CONFIG_FILE)).filter(|p| p.is_file()),
        };
        if let Some(f) = &file {
            let text = std::fs::read_to_string(f)
                .with_context(|| format!("reading config {}", f.display()))?;
            cfg.apply_file_text(&text)
                .with_context(|| format!("in config {}", f.display()))?;
        }
        cfg.apply_overrides(overrides);
        Ok((cfg, file))
    }

    pub fn llm(&self) -> EndpointConfig {
        EndpointConfig {
            endpoint: self.llm_endpoint.clone(),
            model: self.llm_model.clone(),
            token_env: Some(self.llm_token_env.clone()).filter(|s| !s.is_empty()),
            timeout_secs: self.llm_timeout_secs,
        }
    }

    pub fn embed(&self) -> EndpointConfig {
        EndpointConfig {
            endpoint: self.embed_endpoint.clone(),
            model: self.embed_model.clone(),
            token_env: Some(self.embed_token_env.clone()).filter(|s| !s.is_empty()),
            timeout_secs: self.embed_timeout_secs,
        }
    }

    /// The effective configuration in config file syntax.
    pub fn to_file_text(&self) -> String {
        let mut out = String::new();
        let value = serde_json::to_value(self).expect("config serializes");
        for (k, v) in value.as_object().expect("struct") {
            let text = match v {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("{k} = {}\n", toml::Value::String(text)));
        }
        out
    }
}
