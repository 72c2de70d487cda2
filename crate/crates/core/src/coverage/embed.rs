use std::sync::OnceLock;

use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::ngram::tokenize;
use crate::http::{EndpointConfig, HttpError, JsonEndpoint};
use crate::scalar::RealScalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Embedding<T> {
    values: Vec<T>,
}

impl<T: RealScalar> Embedding<T> {
    pub fn new(values: Vec<T>) -> Self {
        Embedding { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn scaled(&self, factor: T) -> Self {
        Embedding::new(self.values.iter().map(|&v| v * factor).collect())
    }
}

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("embedding dimension changed from {expected} to {found}")]
    DimensionDrift { expected: usize, found: usize },
    #[error("embedding endpoint: {0}")]
    Http(#[from] HttpError),
}

/// Text embedding backend. All vectors from one embedder share a
/// dimension.
pub trait Embedder<T: RealScalar = f64>: Send + Sync {
    fn embedder_id(&self) -> &str;
    fn embed(&self, text: &str) -> Result<Embedding<T>, EmbedError>;
}

/// Deterministic embedder for tests and offline runs.
///
/// Each token (lowercased, split on non-alphanumerics) is mapped to a
/// ±1 pattern of length `dim` read from the bits of
/// `SHA-256(token || 0x00 || block_index_le32)`, 256 bits per block. A
/// text vector is the sum of its token patterns scaled to unit length;
/// text without tokens embeds to the zero vector.
#[derive(Debug, Clone)]
pub struct HashEmbedder {
    dim: usize,
    id: String,
}

impl HashEmbedder {
    pub const DEFAULT_DIM: usize = 256;

    /// Panics if `dim < 2`.
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 2, "embedding dimension must be at least 2");
        HashEmbedder {
            dim,
            id: format!("hash-sha256-d{dim}"),
        }
    }

    fn token_pattern(&self, token: &str, acc: &mut [i64]) {
        let blocks = self.dim.div_ceil(256);
        for block in 0..blocks {
            let mut h = Sha256::new();
            h.update(token.as_bytes());
            h.update([0u8]);
            h.update((block as u32).to_le_bytes());
            let digest = h.finalize();
            for bit in 0..256 {
                let i = block * 256 + bit;
                if i >= self.dim {
                    break;
                }
                let set = (digest[bit / 8] >> (bit % 8)) & 1 == 1;
                acc[i] += if set { 1 } else { -1 };
            }
        }
    }
}

impl Default for HashEmbedder {
    fn default() -> Self {
        HashEmbedder::new(Self::DEFAULT_DIM)
    }
}

impl<T: RealScalar> Embedder<T> for HashEmbedder {
    fn embedder_id(&self) -> &str {
        &self.id
    }

    fn embed(&self, text: &str) -> Result<Embedding<T>, EmbedError> {
        let mut acc = vec![0i64; self.dim];
        for token in tokenize(text) {
            self.token_pattern(&token, &mut acc);
        }
        let norm = acc.iter().map(|&v| (v as f64).powi(2)).sum::<f64>().sqrt();
        let values = acc
            .iter()
            .map(|&v| {
                if norm == 0.0 {
                    T::zero()
                } else {
                    T::from_f64(v as f64 / norm)
                }
            })
            .collect();
        Ok(Embedding::new(values))
    }
}

/// Embedder backed by an OpenAI-compatible embeddings endpoint:
/// `{"model", "input"}` in, `data[0].embedding` out.
pub struct HttpEmbedder {
    endpoint: JsonEndpoint,
    dim: OnceLock<usize>,
}

impl HttpEmbedder {
    pub fn new(config: EndpointConfig) -> Result<Self, EmbedError> {
        Ok(HttpEmbedder {
            endpoint: JsonEndpoint::new(config)?,
            dim: OnceLock::new(),
        })
    }
}

impl<T: RealScalar> Embedder<T> for HttpEmbedder {
    fn embedder_id(&self) -> &str {
        &self.endpoint.config().model
    }

    fn embed(&self, text: &str) -> Result<Embedding<T>, EmbedError> {
        let body = json!({"model": self.endpoint.config().model, "input": text});
        let resp = self.endpoint.post(&body)?;
        let values: Vec<T> = resp
            .pointer("/data/0/embedding")
            .and_then(|v| v.as_array())
            .ok_or_else(|| HttpError::Response("missing data[0].embedding".into()))?
            .iter()
            .map(|v| v.as_f64().map(T::from_f64))
            .collect::<Option<_>>()
            .ok_or_else(|| HttpError::Response("non-numeric embedding value".into()))?;
        let expected = *self.dim.get_or_init(|| values.len());
        if values.len() != expected {
            return Err(EmbedError::DimensionDrift {
                expected,
                found: values.len(),
            });
        }
        Ok(Embedding::new(values))
    }
}
