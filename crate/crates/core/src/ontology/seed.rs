use super::{parse_ontology, Ontology};

/// The eight top-level classes required by the MeSO profile.
pub const MESO_ROOT_LABELS: [&str; 8] = [
    "Stressor",
    "StressMediator",
    "StressAppraisal",
    "StressResponse",
    "StressIntervention",
    "StressCopingStrategy",
    "StressCopingOutcome",
    "StressCharacteristics",
];

const SEED_JSON: &str = include_str!("../../data/meso_seed.json");

/// The bundled desk-scale seed ontology.
///
/// CUIs in the seed are placeholders in the unassigned `C9xxxxxx` range;
/// they satisfy the annotation checks but are not UMLS identifiers.
pub fn seed_meso() -> Ontology {
    parse_ontology(SEED_JSON).expect("bundled seed ontology is valid")
}

/// Raw text of the bundled seed file.
pub fn seed_json() -> &'static str {
    SEED_JSON
}
