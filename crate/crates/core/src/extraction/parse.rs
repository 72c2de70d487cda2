//! Strict parser for the model output document.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use super::{EnumValue, ExtractedItem, InfoCategory};
use crate::matcher::MatchCategory;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("model output is not a single JSON document: {0}")]
    NotJson(String),
    #[error("schema violation at {field}: {reason}")]
    SchemaViolation { field: String, reason: String },
    #[error("unknown category key {0:?}")]
    UnknownCategory(String),
    #[error("bad value {value:?} for {field}")]
    BadEnumValue { field: String, value: String },
    #[error("evidence for item {index} ({category}) does not occur in the post")]
    EvidenceGuardViolation {
        index: usize,
        category: InfoCategory,
    },
}

impl ParseError {
    /// Malformed output is worth another attempt with the same prompt.
    pub fn is_retryable(&self) -> bool {
        matches!(
            self,
            ParseError::NotJson(_) | ParseError::SchemaViolation { .. }
        )
    }

    fn schema(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ParseError::SchemaViolation {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

/// An item rejected because its evidence span is not in the post.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuardViolation {
    /// Position of the item in document order across all six keys.
    pub index: usize,
    pub category: InfoCategory,
    pub evidence: String,
}

impl From<&GuardViolation> for ParseError {
    fn from(v: &GuardViolation) -> Self {
        ParseError::EvidenceGuardViolation {
            index: v.index,
            category: v.category,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedOutput {
    /// Items that passed the evidence guard, unmapped.
    pub items: Vec<ExtractedItem>,
    pub violations: Vec<GuardViolation>,
}

impl ParsedOutput {
    /// The guard violations as errors.
    pub fn violation_errors(&self) -> Vec<ParseError> {
        self.violations.iter().map(ParseError::from).collect()
    }
}

fn collapse_fold(s: &str) -> String {
    s.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// Whitespace-collapsed, case-folded substring check.
pub(crate) fn evidence_in_post(evidence: &str, post_text: &str) -> bool {
    let needle = collapse_fold(evidence);
    !needle.is_empty() && collapse_fold(post_text).contains(&needle)
}

const LIST_KEYS: [(InfoCategory, &str); 4] = [
    (InfoCategory::Stressor, "phrase"),
    (InfoCategory::StressResponse, "phrase"),
    (InfoCategory::StressCopingStrategy, "phrase"),
    (InfoCategory::StressDuration, "value_text"),
];

/// Parses raw model output against the output schema and applies the
/// evidence guard. Structural problems fail the whole document; guard
/// failures reject single items and are reported in
/// [`ParsedOutput::violations`].
pub fn parse_llm_output(raw: &str, post_text: &str) -> Result<ParsedOutput, ParseError> {
    let doc: Value = serde_json::from_str(raw).map_err(|e| ParseError::NotJson(e.to_string()))?;
    let Value::Object(obj) = doc else {
        return Err(ParseError::schema("$", "expected an object"));
    };

    let known: Vec<&str> = InfoCategory::ALL.iter().map(|c| c.output_key()).collect();
    let mut unknown: Vec<&String> = obj
        .keys()
        .filter(|k| !known.contains(&k.as_str()))
        .collect();
    unknown.sort();
    if let Some(k) = unknown.first() {
        return Err(ParseError::UnknownCategory((*k).clone()));
    }

    let mut candidates: Vec<ExtractedItem> = Vec::new();
    for (category, text_key) in LIST_KEYS {
        let key = category.output_key();
        let list = obj
            .get(key)
            .ok_or_else(|| ParseError::schema(key, "missing"))?
            .as_array()
            .ok_or_else(|| ParseError::schema(key, "expected a list"))?;
        for (i, entry) in list.iter().enumerate() {
            let path = format!("{key}[{i}]");
            let fields = object_with_keys(entry, &path, &[text_key, "evidence"])?;
            candidates.push(ExtractedItem {
                category,
                evidence_span: string_field(fields, &path, "evidence")?,
                phrase: string_field(fields, &path, text_key)?,
                enum_value: None,
                mapped_concept: None,
                match_category: MatchCategory::None,
            });
        }
    }

    for category in [
        InfoCategory::StressOnset,
        InfoCategory::StressTemporalProfile,
    ] {
        let key = category.output_key();
        let value = obj
            .get(key)
            .ok_or_else(|| ParseError::schema(key, "missing"))?;
        if value.is_null() {
            continue;
        }
        let fields = object_with_keys(value, key, &["value", "evidence"])?;
        let raw_value = string_field(fields, key, "value")?;
        let enum_value = EnumValue::allowed(category)
            .iter()
            .copied()
            .find(|v| v.as_str() == raw_value)
            .ok_or_else(|| ParseError::BadEnumValue {
                field: format!("{key}.value"),
                value: raw_value.clone(),
            })?;
        candidates.push(ExtractedItem {
            category,
            evidence_span: string_field(fields, key, "evidence")?,
            phrase: enum_value.phrase().to_string(),
            enum_value: Some(enum_value),
            mapped_concept: None,
            match_category: MatchCategory::None,
        });
    }

    let mut items = Vec::with_capacity(candidates.len());
    let mut violations = Vec::new();
    for (index, item) in candidates.into_iter().enumerate() {
        if evidence_in_post(&item.evidence_span, post_text) {
            items.push(item);
        } else {
            violations.push(GuardViolation {
                index,
                category: item.category,
                evidence: item.evidence_span,
            });
        }
    }
    Ok(ParsedOutput { items, violations })
}

fn object_with_keys<'a>(
    v: &'a Value,
    path: &str,
    keys: &[&str],
) -> Result<&'a Map<String, Value>, ParseError> {
    let obj = v
        .as_object()
        .ok_or_else(|| ParseError::schema(path, "expected an object"))?;
    if let Some(extra) = obj.keys().find(|k| !keys.contains(&k.as_str())) {
        return Err(ParseError::schema(
            format!("{path}.{extra}"),
            "unexpected field",
        ));
    }
    Ok(obj)
}

fn string_field(obj: &Map<String, Value>, path: &str, key: &str) -> Result<String, ParseError> {
    let field = format!("{path}.{key}");
    let s = obj
        .get(key)
        .ok_or_else(|| ParseError::schema(&field, "missing"))?
        .as_str()
        .ok_or_else(|| ParseError::schema(&field, "expected a string"))?;
    if s.trim().is_empty() {
        return Err(ParseError::schema(&field, "empty"));
    }
    Ok(s.to_string())
}
