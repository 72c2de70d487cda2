use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::extraction::{ExtractionRecord, InfoCategory};
use crate::matcher::MatchCategory;
use crate::text::normalized_key;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnmappedCategory {
    pub category: InfoCategory,
    /// Unmapped items before deduplication.
    pub items: usize,
    pub unique: usize,
    /// First surface form of each unique phrase, in record order.
    pub phrases: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnmappedReport {
    /// Items with no match, durations included.
    pub total_unmapped: usize,
    pub duration_excluded: usize,
    pub remaining: usize,
    pub unique_total: usize,
    /// Categories with at least one unmapped item, in category order.
    pub categories: Vec<UnmappedCategory>,
}

/// Items without an ontology match, durations set aside, deduplicated by
/// normalized phrase within each category.
pub fn unmapped_report(records: &[ExtractionRecord]) -> UnmappedReport {
    let mut total = 0;
    let mut durations = 0;
    let mut by_cat: BTreeMap<InfoCategory, (usize, HashSet<String>, Vec<String>)> = BTreeMap::new();
    for item in records.iter().flat_map(|r| &r.items) {
        if item.match_category != MatchCategory::None {
            continue;
        }
        total += 1;
        if item.category == InfoCategory::StressDuration {
            durations += 1;
            continue;
        }
        let (count, seen, phrases) = by_cat.entry(item.category).or_default();
        *count += 1;
        if seen.insert(normalized_key(&item.phrase)) {
            phrases.push(item.phrase.clone());
        }
    }
    let categories: Vec<UnmappedCategory> = by_cat
        .into_iter()
        .map(|(category, (items, _, phrases))| UnmappedCategory {
            category,
            items,
            unique: phrases.len(),
            phrases,
        })
        .collect();
    UnmappedReport {
        total_unmapped: total,
        duration_excluded: durations,
        remaining: total - durations,
        unique_total: categories.iter().map(|c| c.unique).sum(),
        categories,
    }
}
