//! Ontology-guided extraction of stress information from narrative text.
//!
//! The crate bundles a mental-stress ontology model with a pitfall scanner,
//! a lexical term matcher with five equivalence categories, a zero-shot
//! extraction pipeline over a pluggable completion client, keyword coverage
//! evaluation over a pluggable embedder, and the review/agreement metrics
//! used to score extraction runs.
//!
//! Numeric code is generic over [`Scalar`] / [`RealScalar`]; the aliases at
//! the crate root pin the common instantiations.

pub mod coverage;
pub mod evaluation;
pub mod extraction;
pub mod fsio;
pub mod http;
pub mod matcher;
pub mod ontology;
pub mod percent;
pub mod scalar;
pub mod text;

pub use scalar::{RealScalar, Scalar};

/// Embedding vector in double precision, the default for all embedders.
pub type EmbeddingVector = coverage::Embedding<f64>;
/// Single-precision embedding, for memory-bound pools.
pub type EmbeddingVector32 = coverage::Embedding<f32>;
/// Keyword scored in double precision.
pub type Keyword = coverage::ScoredKeyword<f64>;
/// Kappa weight scheme over doubles.
pub type KappaWeights = evaluation::Weights<f64>;
/// Kappa weight scheme over exact rationals.
pub type ExactKappaWeights = evaluation::Weights<num_rational::Rational64>;
