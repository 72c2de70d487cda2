use std::path::Path;

use super::{Ontology, OntologyDocument, OntologyError};
use crate::fsio::write_atomic;

/// Parses an ontology document without structural checks.
pub fn read_document(path: &Path) -> Result<OntologyDocument, OntologyError> {
    let text = std::fs::read_to_string(path).map_err(|source| OntologyError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_document(&text)
}

fn parse_document(text: &str) -> Result<OntologyDocument, OntologyError> {
    serde_json::from_str(text).map_err(|e| OntologyError::Malformed(e.to_string()))
}

/// Parses and checks an ontology from its JSON text.
pub fn parse_ontology(text: &str) -> Result<Ontology, OntologyError> {
    Ontology::from_document(parse_document(text)?)
}

/// Loads an ontology file. Files with cycles, dangling parents or duplicate
/// ids are refused with the offending pitfalls.
pub fn load_ontology(path: &Path) -> Result<Ontology, OntologyError> {
    Ontology::from_document(read_document(path)?)
}

/// Canonical serialization: concepts in ascending id order, every field
/// present, two-space indentation, trailing newline.
pub fn to_canonical_json(o: &Ontology) -> String {
    let mut out = serde_json::to_string_pretty(&o.to_document()).expect("ontology serializes");
    out.push('\n');
    out
}

pub fn save_ontology(o: &Ontology, path: &Path) -> Result<(), OntologyError> {
    write_atomic(path, to_canonical_json(o).as_bytes()).map_err(|source| OntologyError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{ "name": "t", "version": "1",
        "concepts": [ { "id": "STRONG:000001", "label": "Stressor", "parent_ids": [] } ] }"#;

    #[test]
    fn minimal_document_loads() {
        let o = parse_ontology(MINIMAL).unwrap();
        assert_eq!(o.len(), 1);
        assert_eq!(o.roots().count(), 1);
    }

    #[test]
    fn unknown_top_level_field_rejected() {
        let text = MINIMAL.replacen(
            "\"version\": \"1\",",
            "\"version\": \"1\", \"extra\": 1,",
            1,
        );
        assert!(matches!(
            parse_ontology(&text),
            Err(OntologyError::Malformed(_))
        ));
    }

    #[test]
    fn unknown_concept_field_rejected() {
        let text = MINIMAL.replace(
            "\"parent_ids\": []",
            "\"parent_ids\": [], \"color\": \"red\"",
        );
        assert!(matches!(
            parse_ontology(&text),
            Err(OntologyError::Malformed(_))
        ));
    }

    #[test]
    fn bad_id_or_cui_is_malformed() {
        let text = MINIMAL.replace("STRONG:000001", "STRONG:1");
        assert!(matches!(
            parse_ontology(&text),
            Err(OntologyError::Malformed(_))
        ));
        let text = MINIMAL.replace(
            "\"parent_ids\": []",
            "\"parent_ids\": [], \"umls_cui\": \"C12\"",
        );
        assert!(matches!(
            parse_ontology(&text),
            Err(OntologyError::Malformed(_))
        ));
    }

    #[test]
    fn empty_synonyms_serialize_as_empty_list() {
        let o = parse_ontology(MINIMAL).unwrap();
        let json = to_canonical_json(&o);
        assert!(json.contains("\"synonyms\": []"));
        assert!(json.contains("\"definition\": null"));
        assert!(json.contains("\"source_language\": null"));
    }

    #[test]
    fn canonical_field_order() {
        let o = parse_ontology(MINIMAL).unwrap();
        let json = to_canonical_json(&o);
        let order = [
            "\"id\"",
            "\"label\"",
            "\"parent_ids\"",
            "\"synonyms\"",
            "\"definition\"",
            "\"umls_cui\"",
            "\"umls_preferred_name\"",
            "\"umls_semantic_type\"",
            "\"translation_ko\"",
            "\"source_language\"",
        ];
        let positions: Vec<usize> = order.iter().map(|k| json.find(k).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
        assert!(json.find("\"name\"").unwrap() < json.find("\"version\"").unwrap());
        assert!(json.find("\"version\"").unwrap() < json.find("\"concepts\"").unwrap());
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_ontology(Path::new("/nonexistent/meso.json")).unwrap_err();
        assert!(matches!(err, OntologyError::Io { .. }));
    }
}
