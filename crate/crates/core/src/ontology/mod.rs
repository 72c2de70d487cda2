//! Stress ontology data model, serialization, hierarchy queries and
//! structural validation.
//!
//! An [`Ontology`] can only be built from a concept list that is free of
//! error-severity pitfalls (cycles, dangling parents, duplicate ids), so
//! hierarchy queries never have to guard against malformed graphs. Once
//! built it is immutable and can be shared freely across threads.

mod id;
mod io;
mod seed;
mod validate;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use id::{ConceptId, Cui, IdError};
pub use io::{load_ontology, parse_ontology, read_document, save_ontology, to_canonical_json};
pub use seed::{seed_json, seed_meso, MESO_ROOT_LABELS};
pub use validate::{
    is_upper_camel_case, validate_concepts, validate_ontology, Pitfall, PitfallCode, Profile,
    Severity,
};

#[derive(Debug, Error)]
pub enum OntologyError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed ontology document: {0}")]
    Malformed(String),
    #[error("ontology refused: {} error-severity pitfall(s)", .0.len())]
    Refused(Vec<Pitfall>),
    #[error("unknown concept {0}")]
    UnknownConcept(ConceptId),
}

/// One annotated class of the ontology.
///
/// Field order is the serialization order of the ontology file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Concept {
    pub id: ConceptId,
    pub label: String,
    pub parent_ids: Vec<ConceptId>,
    #[serde(default)]
    pub synonyms: Vec<String>,
    #[serde(default)]
    pub definition: Option<String>,
    #[serde(default)]
    pub umls_cui: Option<Cui>,
    #[serde(default)]
    pub umls_preferred_name: Option<String>,
    #[serde(default)]
    pub umls_semantic_type: Option<String>,
    #[serde(default)]
    pub translation_ko: Option<String>,
    #[serde(default)]
    pub source_language: Option<String>,
}

impl Concept {
    /// A bare concept with no annotations.
    pub fn new(id: ConceptId, label: impl Into<String>, parent_ids: Vec<ConceptId>) -> Self {
        Concept {
            id,
            label: label.into(),
            parent_ids,
            synonyms: Vec::new(),
            definition: None,
            umls_cui: None,
            umls_preferred_name: None,
            umls_semantic_type: None,
            translation_ko: None,
            source_language: None,
        }
    }

    pub fn is_root(&self) -> bool {
        self.parent_ids.is_empty()
    }
}

/// The on-disk document shape, before structural checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OntologyDocument {
    pub name: String,
    pub version: String,
    pub concepts: Vec<Concept>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ontology {
    name: String,
    version: String,
    concepts: BTreeMap<ConceptId, Concept>,
    depth: BTreeMap<ConceptId, usize>,
}

impl Ontology {
    /// Builds an ontology, refusing concept lists with error-severity
    /// pitfalls.
    pub fn new(
        name: impl Into<String>,
        version: impl Into<String>,
        concepts: Vec<Concept>,
    ) -> Result<Self, OntologyError> {
        if concepts.is_empty() {
            return Err(OntologyError::Malformed("ontology has no concepts".into()));
        }
        let errors = validate::structural_errors(&concepts);
        if !errors.is_empty() {
            return Err(OntologyError::Refused(errors));
        }
        let concepts: BTreeMap<ConceptId, Concept> =
            concepts.into_iter().map(|c| (c.id.clone(), c)).collect();
        let depth = compute_depths(&concepts);
        Ok(Ontology {
            name: name.into(),
            version: version.into(),
            concepts,
            depth,
        })
    }

    pub fn from_document(doc: OntologyDocument) -> Result<Self, OntologyError> {
        Ontology::new(doc.name, doc.version, doc.concepts)
    }

    pub fn to_document(&self) -> OntologyDocument {
        OntologyDocument {
            name: self.name.clone(),
            version: self.version.clone(),
            concepts: self.concepts.values().cloned().collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn get(&self, id: &ConceptId) -> Option<&Concept> {
        self.concepts.get(id)
    }

    pub fn contains(&self, id: &ConceptId) -> bool {
        self.concepts.contains_key(id)
    }

    /// Concepts in ascending id order.
    pub fn concepts(&self) -> impl Iterator<Item = &Concept> {
        self.concepts.values()
    }

    pub fn roots(&self) -> impl Iterator<Item = &Concept> {
        self.concepts.values().filter(|c| c.is_root())
    }

    /// Length of the longest parent chain from `id` up to a root; roots
    /// have depth 0.
    pub fn depth(&self, id: &ConceptId) -> Result<usize, OntologyError> {
        self.depth
            .get(id)
            .copied()
            .ok_or_else(|| OntologyError::UnknownConcept(id.clone()))
    }

    /// Transitive closure over `parent_ids`, excluding `id` itself.
    pub fn ancestors(&self, id: &ConceptId) -> Result<BTreeSet<ConceptId>, OntologyError> {
        let start = self
            .concepts
            .get(id)
            .ok_or_else(|| OntologyError::UnknownConcept(id.clone()))?;
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<&ConceptId> = start.parent_ids.iter().collect();
        while let Some(next) = queue.pop_front() {
            if seen.insert(next.clone()) {
                queue.extend(self.concepts[next].parent_ids.iter());
            }
        }
        Ok(seen)
    }

    /// Direct children of `id`, in id order.
    pub fn children(&self, id: &ConceptId) -> Vec<&Concept> {
        self.concepts
            .values()
            .filter(|c| c.parent_ids.contains(id))
            .collect()
    }
}

/// Convenience wrapper mirroring [`Ontology::ancestors`].
pub fn ancestors(o: &Ontology, id: &ConceptId) -> Result<BTreeSet<ConceptId>, OntologyError> {
    o.ancestors(id)
}

fn compute_depths(concepts: &BTreeMap<ConceptId, Concept>) -> BTreeMap<ConceptId, usize> {
    fn visit(
        id: &ConceptId,
        concepts: &BTreeMap<ConceptId, Concept>,
        memo: &mut BTreeMap<ConceptId, usize>,
    ) -> usize {
        if let Some(&d) = memo.get(id) {
            return d;
        }
        let d = concepts[id]
            .parent_ids
            .iter()
            .map(|p| visit(p, concepts, memo) + 1)
            .max()
            .unwrap_or(0);
        memo.insert(id.clone(), d);
        d
    }

    let mut memo = BTreeMap::new();
    for id in concepts.keys() {
        visit(id, concepts, &mut memo);
    }
    memo
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(n: u32) -> ConceptId {
        ConceptId::from_number(n)
    }

    fn concept(n: u32, label: &str, parents: &[u32]) -> Concept {
        Concept::new(id(n), label, parents.iter().map(|&p| id(p)).collect())
    }

    #[test]
    fn single_root_ontology() {
        let o = Ontology::new("t", "1", vec![concept(1, "Stressor", &[])]).unwrap();
        assert_eq!(o.len(), 1);
        assert_eq!(o.roots().count(), 1);
        assert!(o.ancestors(&id(1)).unwrap().is_empty());
    }

    #[test]
    fn chain_ancestors() {
        // A(1) child of B(2) child of C(3)
        let o = Ontology::new(
            "t",
            "1",
            vec![
                concept(1, "Aa", &[2]),
                concept(2, "Bb", &[3]),
                concept(3, "Cc", &[]),
            ],
        )
        .unwrap();
        let got: Vec<_> = o.ancestors(&id(1)).unwrap().into_iter().collect();
        assert_eq!(got, vec![id(2), id(3)]);
        assert_eq!(o.depth(&id(1)).unwrap(), 2);
        assert_eq!(o.depth(&id(3)).unwrap(), 0);
    }

    #[test]
    fn diamond_depth_uses_longest_chain() {
        // 1 -> {2, 4}, 2 -> 3, 3 -> 4
        let o = Ontology::new(
            "t",
            "1",
            vec![
                concept(1, "Aa", &[2, 4]),
                concept(2, "Bb", &[3]),
                concept(3, "Cc", &[4]),
                concept(4, "Dd", &[]),
            ],
        )
        .unwrap();
        assert_eq!(o.depth(&id(1)).unwrap(), 3);
    }

    #[test]
    fn unknown_id_is_an_error() {
        let o = Ontology::new("t", "1", vec![concept(1, "Aa", &[])]).unwrap();
        assert!(matches!(
            o.ancestors(&id(9)),
            Err(OntologyError::UnknownConcept(_))
        ));
        assert!(o.depth(&id(9)).is_err());
    }

    #[test]
    fn two_node_cycle_is_refused() {
        let err = Ontology::new(
            "t",
            "1",
            vec![concept(1, "Aa", &[2]), concept(2, "Bb", &[1])],
        )
        .unwrap_err();
        match err {
            OntologyError::Refused(p) => {
                assert_eq!(p.len(), 1);
                assert_eq!(p[0].code, PitfallCode::Cycle);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_concept_list_is_malformed() {
        assert!(matches!(
            Ontology::new("t", "1", vec![]),
            Err(OntologyError::Malformed(_))
        ));
    }

    #[test]
    fn children_lists_direct_descendants() {
        let o = Ontology::new(
            "t",
            "1",
            vec![
                concept(1, "Aa", &[]),
                concept(2, "Bb", &[1]),
                concept(3, "Cc", &[2]),
            ],
        )
        .unwrap();
        let kids: Vec<_> = o.children(&id(1)).iter().map(|c| c.id.clone()).collect();
        assert_eq!(kids, vec![id(2)]);
    }
}
