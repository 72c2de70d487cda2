//! Lexical mapping of free-text terms onto ontology concepts.
//!
//! A term and a concept label are compared as sets of normalized content
//! tokens (see [`crate::text`]). With `T` the term set and `L` a label set:
//!
//! * **Exact**: `T == L`, or `T` equals the token set of a synonym;
//! * **Broader**: `L ⊊ T`, the concept is more general than the term;
//! * **Narrower**: `T ⊊ L`, the term is more general than the concept;
//! * **Partial**: `T ∩ L ≠ ∅`;
//! * **None**: no overlap with any concept.
//!
//! The first category (in that order) with any candidate wins. Within a
//! category candidates are ranked by Jaccard similarity, then by hierarchy
//! depth (deeper first), then by ascending id.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::{ConceptId, Ontology};
use crate::percent::Percent;
use crate::text::content_tokens;

pub use crate::text::normalize_term;

/// Declaration order is ascending preference, so `Exact` is the maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MatchCategory {
    None,
    Partial,
    Narrower,
    Broader,
    Exact,
}

impl MatchCategory {
    /// Categories from most to least preferred.
    pub const BY_PREFERENCE: [MatchCategory; 5] = [
        MatchCategory::Exact,
        MatchCategory::Broader,
        MatchCategory::Narrower,
        MatchCategory::Partial,
        MatchCategory::None,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MatchCategory::Exact => "Exact",
            MatchCategory::Broader => "Broader",
            MatchCategory::Narrower => "Narrower",
            MatchCategory::Partial => "Partial",
            MatchCategory::None => "None",
        }
    }
}

impl fmt::Display for MatchCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub term: String,
    pub category: MatchCategory,
    pub matched_ids: Vec<ConceptId>,
    /// Token Jaccard between the term and the best match; 1 for exact
    /// matches (including synonym matches), 0 for `None`.
    pub score: f64,
}

impl MatchResult {
    pub fn best(&self) -> Option<&ConceptId> {
        self.matched_ids.first()
    }

    fn none(term: &str) -> Self {
        MatchResult {
            term: term.to_string(),
            category: MatchCategory::None,
            matched_ids: Vec::new(),
            score: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchError {
    #[error("no terms to map")]
    Empty,
    #[error("terms {first:?} and {second:?} normalize to the same form")]
    Duplicate { first: String, second: String },
}

struct Entry {
    id: ConceptId,
    depth: usize,
    label: BTreeSet<String>,
    synonyms: Vec<BTreeSet<String>>,
}

/// Pre-normalized view of an ontology for repeated matching.
pub struct TermMatcher {
    entries: Vec<Entry>,
}

pub fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 0.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

impl TermMatcher {
    pub fn new(o: &Ontology) -> Self {
        let entries = o
            .concepts()
            .map(|c| Entry {
                id: c.id.clone(),
                depth: o.depth(&c.id).expect("concept from this ontology"),
                label: content_tokens(&c.label),
                synonyms: c
                    .synonyms
                    .iter()
                    .map(|s| content_tokens(s))
                    .filter(|s| !s.is_empty())
                    .collect(),
            })
            .collect();
        TermMatcher { entries }
    }

    pub fn map_term(&self, term: &str) -> MatchResult {
        let t = content_tokens(term);
        if t.is_empty() {
            return MatchResult::none(term);
        }

        let exact: Vec<&Entry> = self
            .entries
            .iter()
            .filter(|e| e.label == t || e.synonyms.contains(&t))
            .collect();
        if !exact.is_empty() {
            let ranked = self.rank(&t, exact);
            return MatchResult {
                term: term.to_string(),
                category: MatchCategory::Exact,
                matched_ids: vec![ranked[0].clone()],
                score: 1.0,
            };
        }

        let labelled = || self.entries.iter().filter(|e| !e.label.is_empty());

        let broader: Vec<&Entry> = labelled()
            .filter(|e| e.label.len() < t.len() && e.label.is_subset(&t))
            .collect();
        if !broader.is_empty() {
            return self.result(
                term,
                &t,
                MatchCategory::Broader,
                keep_max_overlap(&t, broader),
            );
        }

        let narrower: Vec<&Entry> = labelled()
            .filter(|e| t.len() < e.label.len() && t.is_subset(&e.label))
            .collect();
        if !narrower.is_empty() {
            return self.result(term, &t, MatchCategory::Narrower, narrower);
        }

        let partial: Vec<&Entry> = labelled().filter(|e| !e.label.is_disjoint(&t)).collect();
        if !partial.is_empty() {
            return self.result(
                term,
                &t,
                MatchCategory::Partial,
                keep_max_overlap(&t, partial),
            );
        }

        MatchResult::none(term)
    }

    fn result(
        &self,
        term: &str,
        t: &BTreeSet<String>,
        category: MatchCategory,
        candidates: Vec<&Entry>,
    ) -> MatchResult {
        let best_score = candidates
            .iter()
            .map(|e| jaccard(t, &e.label))
            .fold(0.0, f64::max);
        MatchResult {
            term: term.to_string(),
            category,
            matched_ids: self.rank(t, candidates),
            score: best_score,
        }
    }

    fn rank(&self, t: &BTreeSet<String>, mut candidates: Vec<&Entry>) -> Vec<ConceptId> {
        candidates.sort_by(|a, b| {
            jaccard(t, &b.label)
                .partial_cmp(&jaccard(t, &a.label))
                .unwrap_or(Ordering::Equal)
                .then(b.depth.cmp(&a.depth))
                .then(a.id.cmp(&b.id))
        });
        candidates.into_iter().map(|e| e.id.clone()).collect()
    }
}

fn keep_max_overlap<'a>(t: &BTreeSet<String>, candidates: Vec<&'a Entry>) -> Vec<&'a Entry> {
    let overlap = |e: &Entry| e.label.intersection(t).count();
    let best = candidates.iter().map(|e| overlap(e)).max().unwrap_or(0);
    candidates
        .into_iter()
        .filter(|e| overlap(e) == best)
        .collect()
}

/// Maps a single term; see the module docs for the category rules.
pub fn map_term(o: &Ontology, term: &str) -> MatchResult {
    TermMatcher::new(o).map_term(term)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CategoryShare {
    pub category: MatchCategory,
    pub count: usize,
    /// One decimal, half-up, over the total term count.
    pub percent: Percent,
}

/// Count and percentage per match category, in preference order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CategoryDistribution {
    pub total: usize,
    pub categories: Vec<CategoryShare>,
}

impl CategoryDistribution {
    pub fn from_counts(counts: &HashMap<MatchCategory, usize>) -> Self {
        let total: usize = counts.values().sum();
        let categories = MatchCategory::BY_PREFERENCE
            .iter()
            .map(|&category| {
                let count = counts.get(&category).copied().unwrap_or(0);
                CategoryShare {
                    category,
                    count,
                    percent: Percent::of(count as u64, total as u64, 1),
                }
            })
            .collect();
        CategoryDistribution { total, categories }
    }

    pub fn from_results(results: &[MatchResult]) -> Self {
        let mut counts = HashMap::new();
        for r in results {
            *counts.entry(r.category).or_insert(0) += 1;
        }
        CategoryDistribution::from_counts(&counts)
    }

    pub fn count(&self, category: MatchCategory) -> usize {
        self.share(category).count
    }

    pub fn percent(&self, category: MatchCategory) -> Percent {
        self.share(category).percent
    }

    fn share(&self, category: MatchCategory) -> &CategoryShare {
        self.categories
            .iter()
            .find(|s| s.category == category)
            .expect("every category present")
    }
}

impl fmt::Display for CategoryDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.categories {
            writeln!(f, "{:<9} {:>5} {:>6}%", s.category, s.count, s.percent)?;
        }
        write!(f, "{:<9} {:>5}", "Total", self.total)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeywordMapping {
    pub results: Vec<MatchResult>,
    pub distribution: CategoryDistribution,
}

/// Maps a list of distinct terms. Terms that normalize to the same token
/// sequence are rejected, as is an empty list.
pub fn map_keywords(o: &Ontology, terms: &[String]) -> Result<KeywordMapping, MatchError> {
    if terms.is_empty() {
        return Err(MatchError::Empty);
    }
    let mut seen: HashMap<Vec<String>, &String> = HashMap::new();
    for term in terms {
        if let Some(first) = seen.insert(normalize_term(term), term) {
            return Err(MatchError::Duplicate {
                first: first.clone(),
                second: term.clone(),
            });
        }
    }
    let matcher = TermMatcher::new(o);
    let results: Vec<MatchResult> = terms.iter().map(|t| matcher.map_term(t)).collect();
    let distribution = CategoryDistribution::from_results(&results);
    Ok(KeywordMapping {
        results,
        distribution,
    })
}
