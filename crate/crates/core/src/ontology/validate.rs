//! Pitfall scanning.
//!
//! Error-severity codes (CYCLE, DANGLING_PARENT, DUP_ID) are exactly the
//! conditions under which an [`Ontology`](super::Ontology) cannot be built.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};

use super::seed::MESO_ROOT_LABELS;
use super::{Concept, ConceptId, Ontology};
use crate::text::normalize_term;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PitfallCode {
    Cycle,
    DanglingParent,
    DupId,
    DupLabel,
    BadNaming,
    MissingAnnotation,
    PossibleEquivalence,
    ProfileRootMismatch,
}

impl PitfallCode {
    pub fn severity(self) -> Severity {
        use PitfallCode::*;
        match self {
            Cycle | DanglingParent | DupId => Severity::Error,
            BadNaming | DupLabel => Severity::Warning,
            MissingAnnotation | PossibleEquivalence | ProfileRootMismatch => Severity::Suggestion,
        }
    }

    pub fn as_str(self) -> &'static str {
        use PitfallCode::*;
        match self {
            Cycle => "CYCLE",
            DanglingParent => "DANGLING_PARENT",
            DupId => "DUP_ID",
            DupLabel => "DUP_LABEL",
            BadNaming => "BAD_NAMING",
            MissingAnnotation => "MISSING_ANNOTATION",
            PossibleEquivalence => "POSSIBLE_EQUIVALENCE",
            ProfileRootMismatch => "PROFILE_ROOT_MISMATCH",
        }
    }
}

impl fmt::Display for PitfallCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Severity {
    Error,
    Warning,
    Suggestion,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Profile {
    #[default]
    Generic,
    /// Generic checks plus the eight-root top level.
    Meso,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pitfall {
    pub code: PitfallCode,
    pub severity: Severity,
    pub subjects: Vec<ConceptId>,
    pub message: String,
}

impl Pitfall {
    fn new(code: PitfallCode, mut subjects: Vec<ConceptId>, message: String) -> Self {
        subjects.sort();
        subjects.dedup();
        Pitfall {
            code,
            severity: code.severity(),
            subjects,
            message,
        }
    }
}

impl fmt::Display for Pitfall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.severity, self.code)?;
        if !self.subjects.is_empty() {
            let ids: Vec<&str> = self.subjects.iter().map(ConceptId::as_str).collect();
            write!(f, " ({})", ids.join(", "))?;
        }
        write!(f, ": {}", self.message)
    }
}

/// Labels must be UpperCamelCase: a leading capital and no separators.
pub fn is_upper_camel_case(label: &str) -> bool {
    let mut chars = label.chars();
    match chars.next() {
        Some(first) if first.is_uppercase() => chars.all(char::is_alphanumeric),
        _ => false,
    }
}

pub fn validate_ontology(o: &Ontology, profile: Profile) -> Vec<Pitfall> {
    let concepts: Vec<Concept> = o.concepts().cloned().collect();
    validate_concepts(&concepts, profile)
}

/// Scans a concept list, which need not form a valid ontology. The result
/// is ordered by code, then by first subject id.
pub fn validate_concepts(concepts: &[Concept], profile: Profile) -> Vec<Pitfall> {
    let mut out = structural_errors(concepts);
    out.extend(naming_pitfalls(concepts));
    out.extend(annotation_pitfalls(concepts));
    out.extend(equivalence_pitfalls(concepts));
    if profile == Profile::Meso {
        out.extend(root_profile_pitfalls(concepts));
    }
    sort_pitfalls(&mut out);
    out
}

pub(crate) fn structural_errors(concepts: &[Concept]) -> Vec<Pitfall> {
    let mut out = Vec::new();

    let mut seen: HashMap<&ConceptId, usize> = HashMap::new();
    for c in concepts {
        *seen.entry(&c.id).or_default() += 1;
    }
    let mut dup_ids: Vec<(&ConceptId, usize)> = seen
        .iter()
        .filter(|(_, &n)| n > 1)
        .map(|(id, &n)| (*id, n))
        .collect();
    dup_ids.sort();
    for (id, n) in dup_ids {
        out.push(Pitfall::new(
            PitfallCode::DupId,
            vec![id.clone()],
            format!("id {id} is used by {n} concepts"),
        ));
    }

    for c in concepts {
        for p in &c.parent_ids {
            if !seen.contains_key(p) {
                out.push(Pitfall::new(
                    PitfallCode::DanglingParent,
                    vec![c.id.clone()],
                    format!("{} ({}) lists missing parent {p}", c.id, c.label),
                ));
            }
        }
    }

    out.extend(cycle_pitfalls(concepts));
    sort_pitfalls(&mut out);
    out
}

fn cycle_pitfalls(concepts: &[Concept]) -> Vec<Pitfall> {
    let mut graph: DiGraph<&ConceptId, ()> = DiGraph::new();
    let mut index: BTreeMap<&ConceptId, NodeIndex> = BTreeMap::new();
    for c in concepts {
        index.entry(&c.id).or_insert_with(|| graph.add_node(&c.id));
    }
    for c in concepts {
        let child = index[&c.id];
        for p in &c.parent_ids {
            if let Some(&parent) = index.get(p) {
                graph.update_edge(child, parent, ());
            }
        }
    }

    tarjan_scc(&graph)
        .into_iter()
        .filter(|scc| scc.len() > 1 || graph.contains_edge(scc[0], scc[0]))
        .map(|scc| {
            let ids: Vec<ConceptId> = scc.iter().map(|&n| graph[n].clone()).collect();
            let mut names: Vec<&str> = ids.iter().map(ConceptId::as_str).collect();
            names.sort();
            let message = format!("parent relation forms a cycle through {}", names.join(", "));
            Pitfall::new(PitfallCode::Cycle, ids, message)
        })
        .collect()
}

fn naming_pitfalls(concepts: &[Concept]) -> Vec<Pitfall> {
    let mut out = Vec::new();
    for c in concepts {
        if !is_upper_camel_case(&c.label) {
            out.push(Pitfall::new(
                PitfallCode::BadNaming,
                vec![c.id.clone()],
                format!("label {:?} is not UpperCamelCase", c.label),
            ));
        }
    }

    let mut by_label: BTreeMap<Vec<String>, Vec<ConceptId>> = BTreeMap::new();
    for c in concepts {
        let key = normalize_term(&c.label);
        if !key.is_empty() {
            by_label.entry(key).or_default().push(c.id.clone());
        }
    }
    for (key, ids) in by_label {
        if ids.len() > 1 {
            out.push(Pitfall::new(
                PitfallCode::DupLabel,
                ids,
                format!(
                    "label normalizes to {:?} for more than one concept",
                    key.join(" ")
                ),
            ));
        }
    }
    out
}

fn is_blank(field: &Option<String>) -> bool {
    field.as_deref().is_none_or(|s| s.trim().is_empty())
}

fn annotation_pitfalls(concepts: &[Concept]) -> Vec<Pitfall> {
    concepts
        .iter()
        .filter_map(|c| {
            let mut missing = Vec::new();
            if c.umls_cui.is_none() {
                missing.push("umls_cui");
            }
            if is_blank(&c.definition) {
                missing.push("definition");
            }
            (!missing.is_empty()).then(|| {
                Pitfall::new(
                    PitfallCode::MissingAnnotation,
                    vec![c.id.clone()],
                    format!("{} lacks {}", c.label, missing.join(" and ")),
                )
            })
        })
        .collect()
}

/// Shared CUI, or identical normalized token sets whose token sequences
/// differ (identical sequences are already DUP_LABEL).
fn equivalence_pitfalls(concepts: &[Concept]) -> Vec<Pitfall> {
    let keyed: Vec<(&Concept, Vec<String>, BTreeSet<String>)> = concepts
        .iter()
        .map(|c| {
            let seq = normalize_term(&c.label);
            let set = seq.iter().cloned().collect();
            (c, seq, set)
        })
        .collect();

    let mut out = Vec::new();
    for (i, (a, a_seq, a_set)) in keyed.iter().enumerate() {
        for (b, b_seq, b_set) in &keyed[i + 1..] {
            if a.id == b.id {
                continue;
            }
            if let (Some(ca), Some(cb)) = (&a.umls_cui, &b.umls_cui) {
                if ca == cb {
                    out.push(Pitfall::new(
                        PitfallCode::PossibleEquivalence,
                        vec![a.id.clone(), b.id.clone()],
                        format!("{} and {} share UMLS CUI {ca}", a.label, b.label),
                    ));
                    continue;
                }
            }
            if !a_set.is_empty() && a_set == b_set && a_seq != b_seq {
                out.push(Pitfall::new(
                    PitfallCode::PossibleEquivalence,
                    vec![a.id.clone(), b.id.clone()],
                    format!("{} and {} have identical label tokens", a.label, b.label),
                ));
            }
        }
    }
    out
}

fn root_profile_pitfalls(concepts: &[Concept]) -> Vec<Pitfall> {
    let roots: Vec<&Concept> = concepts.iter().filter(|c| c.is_root()).collect();
    let expected: BTreeSet<&str> = MESO_ROOT_LABELS.iter().copied().collect();
    let found: BTreeSet<&str> = roots.iter().map(|c| c.label.as_str()).collect();

    let unexpected: Vec<&Concept> = roots
        .iter()
        .copied()
        .filter(|c| !expected.contains(c.label.as_str()))
        .collect();
    let missing: Vec<&str> = expected.difference(&found).copied().collect();

    if roots.len() == expected.len() && unexpected.is_empty() && missing.is_empty() {
        return Vec::new();
    }
    let mut parts = vec![format!(
        "expected {} roots, found {}",
        expected.len(),
        roots.len()
    )];
    if !missing.is_empty() {
        parts.push(format!("missing {}", missing.join(", ")));
    }
    if !unexpected.is_empty() {
        let labels: Vec<&str> = unexpected.iter().map(|c| c.label.as_str()).collect();
        parts.push(format!("unexpected {}", labels.join(", ")));
    }
    vec![Pitfall::new(
        PitfallCode::ProfileRootMismatch,
        unexpected.iter().map(|c| c.id.clone()).collect(),
        parts.join("; "),
    )]
}

fn sort_pitfalls(p: &mut [Pitfall]) {
    p.sort_by(|a, b| {
        (a.code, a.subjects.first(), &a.subjects, &a.message).cmp(&(
            b.code,
            b.subjects.first(),
            &b.subjects,
            &b.message,
        ))
    });
}
