#![allow(dead_code)]

use std::collections::BTreeSet;

use meso_core::matcher::MatchCategory;
use meso_core::ontology::{Concept, ConceptId, Ontology};
use proptest::prelude::*;

/// Words that survive normalization unchanged.
pub const VOCAB: [&str; 10] = [
    "alpha", "beta", "gamma", "delta", "omega", "sleep", "work", "panic", "grief", "fear",
];

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    c.next().unwrap().to_uppercase().chain(c).collect()
}

/// Description of one generated concept: label words, synonym words, parent
/// picks (indices into earlier concepts).
#[derive(Debug, Clone)]
pub struct ConceptSpec {
    pub label: Vec<usize>,
    pub synonym: Option<Vec<usize>>,
    pub parents: Vec<usize>,
}

pub fn concept_spec() -> impl Strategy<Value = ConceptSpec> {
    (
        proptest::sample::subsequence((0..VOCAB.len()).collect::<Vec<_>>(), 1..=3).prop_shuffle(),
        proptest::option::of(proptest::sample::subsequence(
            (0..VOCAB.len()).collect::<Vec<_>>(),
            1..=2,
        )),
        proptest::collection::vec(any::<usize>(), 0..=2),
    )
        .prop_map(|(label, synonym, parents)| ConceptSpec {
            label,
            synonym,
            parents,
        })
}

pub fn build_concepts(specs: &[ConceptSpec]) -> Vec<Concept> {
    specs
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let label: String = s.label.iter().map(|&i| capitalize(VOCAB[i])).collect();
            let mut parents: Vec<ConceptId> = if k == 0 {
                Vec::new()
            } else {
                s.parents
                    .iter()
                    .map(|p| ConceptId::from_number((p % k) as u32 + 1))
                    .collect()
            };
            parents.sort();
            parents.dedup();
            let mut c = Concept::new(ConceptId::from_number(k as u32 + 1), label, parents);
            if let Some(syn) = &s.synonym {
                c.synonyms = vec![syn.iter().map(|&i| VOCAB[i]).collect::<Vec<_>>().join(" ")];
            }
            c
        })
        .collect()
}

pub fn ontology_strategy(max: usize) -> impl Strategy<Value = Ontology> {
    proptest::collection::vec(concept_spec(), 1..=max).prop_map(|specs| {
        Ontology::new("random", "1", build_concepts(&specs)).expect("generated ontology is valid")
    })
}

/// Terms of 1 to 5 content words, with random case and stop words mixed in.
pub fn term_strategy() -> impl Strategy<Value = String> {
    proptest::collection::vec(
        (0..VOCAB.len() + 2, any::<bool>()).prop_map(|(i, upper)| {
            let w = match i {
                i if i < VOCAB.len() => VOCAB[i].to_string(),
                i if i == VOCAB.len() => "of".to_string(),
                _ => "the".to_string(),
            };
            if upper {
                w.to_uppercase()
            } else {
                w
            }
        }),
        1..=5,
    )
    .prop_map(|words| words.join(" "))
}

/// Splits an UpperCamelCase label made of vocabulary words.
fn oracle_label_tokens(label: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut cur = String::new();
    for ch in label.chars() {
        if ch.is_uppercase() && !cur.is_empty() {
            out.insert(std::mem::take(&mut cur));
        }
        cur.push(ch.to_ascii_lowercase());
    }
    out.insert(cur);
    out
}

fn oracle_term_tokens(term: &str) -> BTreeSet<String> {
    term.split_whitespace()
        .map(str::to_lowercase)
        .filter(|w| w != "of" && w != "the")
        .collect()
}

/// Concept id, label tokens and synonym token sets.
type Entry = (ConceptId, BTreeSet<String>, Vec<BTreeSet<String>>);

/// Brute-force evaluation of the five category definitions in priority
/// order. Returns the category and the candidate ids the implementation
/// is allowed to report.
pub fn oracle(o: &Ontology, term: &str) -> (MatchCategory, BTreeSet<ConceptId>) {
    let t = oracle_term_tokens(term);
    if t.is_empty() {
        return (MatchCategory::None, BTreeSet::new());
    }
    let concepts: Vec<(ConceptId, BTreeSet<String>, Vec<BTreeSet<String>>)> = o
        .concepts()
        .map(|c| {
            (
                c.id.clone(),
                oracle_label_tokens(&c.label),
                c.synonyms.iter().map(|s| oracle_term_tokens(s)).collect(),
            )
        })
        .collect();

    let exact: BTreeSet<ConceptId> = concepts
        .iter()
        .filter(|(_, l, syn)| *l == t || syn.contains(&t))
        .map(|(id, _, _)| id.clone())
        .collect();
    if !exact.is_empty() {
        return (MatchCategory::Exact, exact);
    }
    let max_overlap = |cands: Vec<&Entry>| {
        let best = cands
            .iter()
            .map(|c| c.1.intersection(&t).count())
            .max()
            .unwrap_or(0);
        cands
            .into_iter()
            .filter(|c| c.1.intersection(&t).count() == best)
            .map(|c| c.0.clone())
            .collect::<BTreeSet<_>>()
    };
    let broader: Vec<_> = concepts
        .iter()
        .filter(|(_, l, _)| l.is_subset(&t) && l.len() < t.len())
        .collect();
    if !broader.is_empty() {
        return (MatchCategory::Broader, max_overlap(broader));
    }
    let narrower: BTreeSet<ConceptId> = concepts
        .iter()
        .filter(|(_, l, _)| t.is_subset(l) && t.len() < l.len())
        .map(|c| c.0.clone())
        .collect();
    if !narrower.is_empty() {
        return (MatchCategory::Narrower, narrower);
    }
    let partial: Vec<_> = concepts
        .iter()
        .filter(|(_, l, _)| !l.is_disjoint(&t))
        .collect();
    if !partial.is_empty() {
        return (MatchCategory::Partial, max_overlap(partial));
    }
    (MatchCategory::None, BTreeSet::new())
}
