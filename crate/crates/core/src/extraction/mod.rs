//! Zero-shot extraction of six categories of stress information.
//!
//! The flow for one post is [`build_prompt`] → [`CompletionClient::complete`]
//! → [`parse_llm_output`] → ontology mapping, orchestrated by
//! [`extract_post`] and [`extract_batch`].

mod client;
mod parse;
mod pipeline;
mod prompt;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::matcher::MatchCategory;
use crate::ontology::ConceptId;

pub use client::{
    pack_fixtures, prompt_sha256, ClientError, CompletionClient, FixtureEntry, HttpClientConfig,
    HttpCompletionClient, MockCompletionClient,
};
pub use parse::{parse_llm_output, GuardViolation, ParseError, ParsedOutput};
pub use pipeline::{extract_batch, extract_post, ExtractError, Extractor, DEFAULT_RETRIES};
pub use prompt::{build_prompt, PromptError, PROMPT_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum InfoCategory {
    Stressor,
    StressResponse,
    StressCopingStrategy,
    StressDuration,
    StressOnset,
    StressTemporalProfile,
}

impl InfoCategory {
    pub const ALL: [InfoCategory; 6] = [
        InfoCategory::Stressor,
        InfoCategory::StressResponse,
        InfoCategory::StressCopingStrategy,
        InfoCategory::StressDuration,
        InfoCategory::StressOnset,
        InfoCategory::StressTemporalProfile,
    ];

    /// Identifier used in records, review sheets and metrics.
    pub fn as_str(self) -> &'static str {
        match self {
            InfoCategory::Stressor => "Stressor",
            InfoCategory::StressResponse => "StressResponse",
            InfoCategory::StressCopingStrategy => "StressCopingStrategy",
            InfoCategory::StressDuration => "StressDuration",
            InfoCategory::StressOnset => "StressOnset",
            InfoCategory::StressTemporalProfile => "StressTemporalProfile",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            InfoCategory::Stressor => "Stressor",
            InfoCategory::StressResponse => "Stress Response",
            InfoCategory::StressCopingStrategy => "Stress Coping Strategy",
            InfoCategory::StressDuration => "Stress Duration",
            InfoCategory::StressOnset => "Stress Onset",
            InfoCategory::StressTemporalProfile => "Stress Temporal Profile",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            InfoCategory::Stressor => "Source or causes of stress",
            InfoCategory::StressResponse => {
                "Mental, emotional, physical, or behavioral reaction to stress"
            }
            InfoCategory::StressCopingStrategy => "The methods used to manage stress",
            InfoCategory::StressDuration => "How long the stress lasts",
            InfoCategory::StressOnset => {
                "The manner in which stress begins \u{2013} sudden or gradual"
            }
            InfoCategory::StressTemporalProfile => {
                "The overall pattern of stress - acute or chronic"
            }
        }
    }

    /// Key of this category in the model output document.
    pub fn output_key(self) -> &'static str {
        match self {
            InfoCategory::Stressor => "stressors",
            InfoCategory::StressResponse => "stress_responses",
            InfoCategory::StressCopingStrategy => "coping_strategies",
            InfoCategory::StressDuration => "durations",
            InfoCategory::StressOnset => "onset",
            InfoCategory::StressTemporalProfile => "temporal_profile",
        }
    }

    /// Onset and temporal profile carry an enumerated value and occur at
    /// most once per post.
    pub fn is_enumerated(self) -> bool {
        matches!(
            self,
            InfoCategory::StressOnset | InfoCategory::StressTemporalProfile
        )
    }

    /// Durations are numeric and never mapped to the ontology.
    pub fn is_mappable(self) -> bool {
        self != InfoCategory::StressDuration
    }

    pub fn parse(s: &str) -> Option<Self> {
        InfoCategory::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for InfoCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnumValue {
    Sudden,
    Gradual,
    Acute,
    Chronic,
}

impl EnumValue {
    pub fn allowed(category: InfoCategory) -> &'static [EnumValue] {
        match category {
            InfoCategory::StressOnset => &[EnumValue::Sudden, EnumValue::Gradual],
            InfoCategory::StressTemporalProfile => &[EnumValue::Acute, EnumValue::Chronic],
            _ => &[],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EnumValue::Sudden => "Sudden",
            EnumValue::Gradual => "Gradual",
            EnumValue::Acute => "Acute",
            EnumValue::Chronic => "Chronic",
        }
    }

    /// Concept phrase mapped for an enumerated item, e.g. "sudden onset".
    pub fn phrase(self) -> &'static str {
        match self {
            EnumValue::Sudden => "sudden onset",
            EnumValue::Gradual => "gradual onset",
            EnumValue::Acute => "acute stress",
            EnumValue::Chronic => "chronic stress",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractedItem {
    pub category: InfoCategory,
    pub evidence_span: String,
    pub phrase: String,
    pub enum_value: Option<EnumValue>,
    pub mapped_concept: Option<ConceptId>,
    pub match_category: MatchCategory,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diagnostics {
    /// Completion calls made, including retries.
    pub attempts: usize,
    /// Items dropped because their evidence was not found in the post.
    pub guard_violations: Vec<GuardViolation>,
    /// Set when the post failed; `items` is then empty.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractionRecord {
    pub post_id: String,
    pub post_hash: String,
    pub items: Vec<ExtractedItem>,
    pub model_id: String,
    pub prompt_version: String,
    pub diagnostics: Diagnostics,
}

impl ExtractionRecord {
    pub fn items_in(&self, category: InfoCategory) -> impl Iterator<Item = &ExtractedItem> {
        self.items.iter().filter(move |i| i.category == category)
    }

    pub fn is_failure(&self) -> bool {
        self.diagnostics.error.is_some()
    }
}

/// One input post.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Post {
    pub id: String,
    pub text: String,
}

/// Hex SHA-256 of the post text.
pub fn post_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[derive(Debug, Error)]
pub enum JsonlError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
}

fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, JsonlError> {
    let text = std::fs::read_to_string(path)?;
    parse_jsonl(&text)
}

/// Parses JSON Lines; blank lines are skipped.
pub fn parse_jsonl<T: serde::de::DeserializeOwned>(text: &str) -> Result<Vec<T>, JsonlError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| JsonlError::Line {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn to_jsonl<T: Serialize>(rows: &[T]) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&serde_json::to_string(r).expect("serializable row"));
        out.push('\n');
    }
    out
}

pub fn read_posts(path: &Path) -> Result<Vec<Post>, JsonlError> {
    read_jsonl(path)
}

pub fn read_records(path: &Path) -> Result<Vec<ExtractionRecord>, JsonlError> {
    read_jsonl(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn category_names_round_trip() {
        for c in InfoCategory::ALL {
            assert_eq!(InfoCategory::parse(c.as_str()), Some(c));
            let json = serde_json::to_string(&c).unwrap();
            assert_eq!(json, format!("\"{}\"", c.as_str()));
        }
        assert_eq!(InfoCategory::parse("Mood"), None);
    }

    #[test]
    fn only_onset_and_profile_are_enumerated() {
        let e: Vec<_> = InfoCategory::ALL
            .into_iter()
            .filter(|c| c.is_enumerated())
            .collect();
        assert_eq!(
            e,
            [
                InfoCategory::StressOnset,
                InfoCategory::StressTemporalProfile
            ]
        );
        assert!(!InfoCategory::StressDuration.is_mappable());
    }

    #[test]
    fn jsonl_reports_line_numbers() {
        let err = parse_jsonl::<Post>("{\"id\":\"a\",\"text\":\"x\"}\n\nnot json\n").unwrap_err();
        assert!(matches!(err, JsonlError::Line { line: 3, .. }));
    }

    #[test]
    fn post_hash_is_sha256_hex() {
        assert_eq!(
            post_hash("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
