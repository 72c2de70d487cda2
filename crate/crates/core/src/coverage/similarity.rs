use thiserror::Error;

use super::Embedding;
use crate::scalar::RealScalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimilarityError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("cosine similarity is undefined for a zero vector")]
    ZeroVector,
}

/// `dot(a, b) / (|a| |b|)`, clamped to [-1, 1].
pub fn cosine_similarity<T: RealScalar>(
    a: &Embedding<T>,
    b: &Embedding<T>,
) -> Result<T, SimilarityError> {
    if a.dim() != b.dim() {
        return Err(SimilarityError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let (mut dot, mut aa, mut bb) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in a.values().iter().zip(b.values()) {
        dot = dot + x * y;
        aa = aa + x * x;
        bb = bb + y * y;
    }
    if aa.is_zero() || bb.is_zero() {
        return Err(SimilarityError::ZeroVector);
    }
    let c = dot / (aa.sqrt() * bb.sqrt());
    Ok(c.max(-T::one()).min(T::one()))
}
