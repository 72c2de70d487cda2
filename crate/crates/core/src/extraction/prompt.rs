use std::fmt::Write;

use thiserror::Error;

use super::InfoCategory;
use crate::ontology::Ontology;

/// Version tag recorded on every extraction record. Bump whenever the
/// template text changes; canned fixtures are keyed by prompt hash.
pub const PROMPT_VERSION: &str = "zero-shot-v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("post text is empty")]
    EmptyPost,
}

const OUTPUT_CONTRACT: &str = r#"{ "stressors": [ {"phrase": str, "evidence": str} ],
  "stress_responses": [ {"phrase": str, "evidence": str} ],
  "coping_strategies": [ {"phrase": str, "evidence": str} ],
  "durations": [ {"value_text": str, "evidence": str} ],
  "onset": {"value": "Sudden"|"Gradual", "evidence": str} | null,
  "temporal_profile": {"value": "Acute"|"Chronic", "evidence": str} | null }"#;

/// Builds the zero-shot extraction prompt for one post.
///
/// Section order is fixed: task, category definitions, enumerations,
/// concept inventory, output contract, evidence rules, post. No worked
/// examples are included.
pub fn build_prompt(o: &Ontology, post_text: &str) -> Result<String, PromptError> {
    if post_text.trim().is_empty() {
        return Err(PromptError::EmptyPost);
    }
    let mut p = String::with_capacity(4096 + post_text.len());

    p.push_str(
        "You are extracting structured stress information from a personal narrative.\n\
         Read the post at the end of this message and identify every item that belongs to \
         one of the six categories defined below.\n\n",
    );

    p.push_str("## Categories\n");
    for c in InfoCategory::ALL {
        writeln!(p, "- {}: {}", c.display_name(), c.description()).unwrap();
    }
    p.push_str(
        "Help-seeking counts as a coping strategy only when the writer explicitly asks others \
         for advice or help; venting alone is not help-seeking.\n\n",
    );

    p.push_str("## Allowed values\n");
    p.push_str("- onset: Sudden | Gradual\n");
    p.push_str("- temporal_profile: Acute | Chronic\n\n");

    p.push_str("## Ontology concepts (id<TAB>label)\n");
    p.push_str(
        "Phrase stressors, stress responses and coping strategies with the closest concept \
         label below when one fits; otherwise use a short noun phrase.\n",
    );
    for c in o.concepts() {
        writeln!(p, "{}\t{}", c.id, c.label).unwrap();
    }
    p.push('\n');

    p.push_str("## Output format\n");
    p.push_str(
        "Return exactly one JSON document with these six keys and nothing else \
         (no prose, no code fences):\n",
    );
    p.push_str(OUTPUT_CONTRACT);
    p.push_str("\n\n");

    p.push_str("## Rules\n");
    p.push_str(
        "- Every item must quote, in \"evidence\", a verbatim span copied from the post.\n\
         - If the post contains no information for a category, return an empty list (or null \
         for onset and temporal_profile). Never invent an item.\n\
         - Report at most one onset and at most one temporal_profile.\n\
         - For durations, copy the stated length of time into \"value_text\".\n\n",
    );

    p.push_str("## Post\n");
    p.push_str(post_text);
    p.push('\n');
    Ok(p)
}
