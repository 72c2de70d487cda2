use rayon::prelude::*;
use thiserror::Error;

use super::{
    build_prompt, parse_llm_output, post_hash, ClientError, CompletionClient, Diagnostics,
    ExtractionRecord, ParseError, Post, PromptError, PROMPT_VERSION,
};
use crate::matcher::{MatchCategory, TermMatcher};
use crate::ontology::Ontology;

pub const DEFAULT_RETRIES: usize = 2;

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error("model output rejected after {attempts} attempt(s): {last}")]
    ExhaustedRetries { attempts: usize, last: ParseError },
    #[error("model output rejected: {0}")]
    Invalid(ParseError),
    #[error("parallelism must be at least 1")]
    BadParallelism,
}

/// Runs extraction for posts against one ontology and client.
pub struct Extractor<'a, C: CompletionClient + ?Sized> {
    client: &'a C,
    ontology: &'a Ontology,
    matcher: TermMatcher,
    retries: usize,
}

impl<'a, C: CompletionClient + ?Sized> Extractor<'a, C> {
    pub fn new(client: &'a C, ontology: &'a Ontology, retries: usize) -> Self {
        Extractor {
            client,
            ontology,
            matcher: TermMatcher::new(ontology),
            retries,
        }
    }

    /// Prompt, complete, parse and map one post. Malformed output (not
    /// JSON, schema violation) is retried with the identical prompt up to
    /// `retries` times; other parse errors fail immediately. Items whose
    /// evidence is not in the post are dropped and listed in the
    /// diagnostics.
    pub fn extract(
        &self,
        post_id: &str,
        post_text: &str,
    ) -> Result<ExtractionRecord, ExtractError> {
        let prompt = build_prompt(self.ontology, post_text)?;
        let mut attempts = 0;
        let parsed = loop {
            attempts += 1;
            let raw = self.client.complete(&prompt)?;
            match parse_llm_output(&raw, post_text) {
                Ok(p) => break p,
                Err(e) if e.is_retryable() => {
                    if attempts > self.retries {
                        return Err(ExtractError::ExhaustedRetries { attempts, last: e });
                    }
                }
                Err(e) => return Err(ExtractError::Invalid(e)),
            }
        };

        let mut items = parsed.items;
        for item in &mut items {
            if item.category.is_mappable() {
                let m = self.matcher.map_term(&item.phrase);
                item.mapped_concept = m.best().cloned();
                item.match_category = m.category;
            } else {
                item.mapped_concept = None;
                item.match_category = MatchCategory::None;
            }
        }

        Ok(ExtractionRecord {
            post_id: post_id.to_string(),
            post_hash: post_hash(post_text),
            items,
            model_id: self.client.model_id().to_string(),
            prompt_version: PROMPT_VERSION.to_string(),
            diagnostics: Diagnostics {
                attempts,
                guard_violations: parsed.violations,
                error: None,
            },
        })
    }

    /// Like [`Extractor::extract`], but a failure becomes a record with no
    /// items and the error message in its diagnostics.
    pub fn extract_or_record_failure(&self, post: &Post) -> ExtractionRecord {
        self.extract(&post.id, &post.text)
            .unwrap_or_else(|e| ExtractionRecord {
                post_id: post.id.clone(),
                post_hash: post_hash(&post.text),
                items: Vec::new(),
                model_id: self.client.model_id().to_string(),
                prompt_version: PROMPT_VERSION.to_string(),
                diagnostics: Diagnostics {
                    attempts: 0,
                    guard_violations: Vec::new(),
                    error: Some(e.to_string()),
                },
            })
    }
}

pub fn extract_post<C: CompletionClient + ?Sized>(
    client: &C,
    o: &Ontology,
    post_id: &str,
    post_text: &str,
    retries: usize,
) -> Result<ExtractionRecord, ExtractError> {
    Extractor::new(client, o, retries).extract(post_id, post_text)
}

/// Extracts every post with up to `parallelism` concurrent calls. Output
/// order is input order; per-post failures are embedded in the records.
pub fn extract_batch<C: CompletionClient + ?Sized>(
    client: &C,
    o: &Ontology,
    posts: &[Post],
    parallelism: usize,
    retries: usize,
) -> Result<Vec<ExtractionRecord>, ExtractError> {
    if parallelism == 0 {
        return Err(ExtractError::BadParallelism);
    }
    let extractor = Extractor::new(client, o, retries);
    if parallelism == 1 {
        return Ok(posts
            .iter()
            .map(|p| extractor.extract_or_record_failure(p))
            .collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .expect("thread pool");
    Ok(pool.install(|| {
        posts
            .par_iter()
            .map(|p| extractor.extract_or_record_failure(p))
            .collect()
    }))
}
