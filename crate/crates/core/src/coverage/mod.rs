//! Ontology coverage evaluation from document keywords.
//!
//! Keywords are ranked the KeyBERT way: every n-gram candidate is embedded
//! and scored by cosine similarity to the embedding of its document. The
//! top `k` per n-gram level per document are pooled, deduplicated by
//! normalized form and mapped onto the ontology.

mod embed;
mod ngram;
mod similarity;

use std::cmp::Ordering;
use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::matcher::{map_keywords, CategoryDistribution, MatchError, MatchResult};
use crate::ontology::Ontology;
use crate::scalar::RealScalar;
use crate::text::normalized_key;

pub use embed::{EmbedError, Embedder, Embedding, HashEmbedder, HttpEmbedder};
pub use ngram::{
    default_stopwords, ngram_candidates, parse_stopwords, tokenize, NgramSizes, StopWords,
};
pub use similarity::{cosine_similarity, SimilarityError};

pub const DEFAULT_TOP_K: usize = 10;

#[derive(Debug, Error)]
pub enum CoverageError {
    #[error("invalid n-gram size {0}; sizes must be in 1..=3")]
    InvalidNgram(usize),
    #[error("k must be at least 1")]
    InvalidK,
    #[error("no documents")]
    NoDocuments,
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
    #[error(transparent)]
    Match(#[from] MatchError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredKeyword<T> {
    pub text: String,
    pub n: usize,
    /// Cosine similarity to the source document.
    pub score: T,
}

/// Top `k` candidates per n-gram level, grouped by ascending n and ranked
/// by descending score; equal scores fall back to lexicographic order.
pub fn top_keywords<T: RealScalar, E: Embedder<T> + ?Sized>(
    embedder: &E,
    doc: &str,
    k: usize,
    sizes: &NgramSizes,
    stopwords: &StopWords,
) -> Result<Vec<ScoredKeyword<T>>, CoverageError> {
    if k == 0 {
        return Err(CoverageError::InvalidK);
    }
    let groups = ngram::candidates_by_n(doc, sizes, stopwords);
    if groups.iter().all(|(_, c)| c.is_empty()) {
        return Ok(Vec::new());
    }
    let doc_vec = embedder.embed(doc)?;
    let mut out = Vec::new();
    for (n, candidates) in groups {
        let mut scored = candidates
            .into_iter()
            .map(|text| {
                let v = embedder.embed(&text)?;
                let score = cosine_similarity(&v, &doc_vec)?;
                Ok(ScoredKeyword { text, n, score })
            })
            .collect::<Result<Vec<_>, CoverageError>>()?;
        scored.sort_by(|a, b| {
            b.score
                .partial_cmp(&a.score)
                .unwrap_or(Ordering::Equal)
                .then_with(|| a.text.cmp(&b.text))
        });
        scored.truncate(k);
        out.extend(scored);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageEntry {
    /// Index of the first document that produced the keyword, if known.
    pub doc_index: Option<usize>,
    pub keyword: String,
    pub result: MatchResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub total_keywords: usize,
    pub distribution: CategoryDistribution,
    pub keywords: Vec<CoverageEntry>,
}

/// Deduplicates a keyword pool by normalized form (first surface form
/// wins) and maps it onto the ontology.
pub fn coverage_from_keywords(
    o: &Ontology,
    pool: impl IntoIterator<Item = (Option<usize>, String)>,
) -> Result<CoverageReport, CoverageError> {
    let mut seen = HashSet::new();
    let kept: Vec<(Option<usize>, String)> = pool
        .into_iter()
        .filter(|(_, kw)| seen.insert(normalized_key(kw)))
        .collect();
    let terms: Vec<String> = kept.iter().map(|(_, k)| k.clone()).collect();
    let mapping = map_keywords(o, &terms)?;
    let keywords = kept
        .into_iter()
        .zip(mapping.results)
        .map(|((doc_index, keyword), result)| CoverageEntry {
            doc_index,
            keyword,
            result,
        })
        .collect();
    Ok(CoverageReport {
        total_keywords: terms.len(),
        distribution: mapping.distribution,
        keywords,
    })
}

/// Keyword extraction over every document followed by
/// [`coverage_from_keywords`]. Documents are processed in parallel; the
/// pool is assembled in (document, n, rank) order, so the report does not
/// depend on scheduling.
pub fn coverage_report<T: RealScalar, E: Embedder<T> + ?Sized>(
    o: &Ontology,
    docs: &[String],
    embedder: &E,
    k: usize,
    sizes: &NgramSizes,
    stopwords: &StopWords,
) -> Result<CoverageReport, CoverageError> {
    if docs.is_empty() {
        return Err(CoverageError::NoDocuments);
    }
    let per_doc = docs
        .par_iter()
        .map(|d| top_keywords(embedder, d, k, sizes, stopwords))
        .collect::<Result<Vec<_>, _>>()?;
    let pool = per_doc
        .into_iter()
        .enumerate()
        .flat_map(|(i, kws)| kws.into_iter().map(move |kw| (Some(i), kw.text)));
    coverage_from_keywords(o, pool)
}
