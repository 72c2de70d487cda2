mod common;

use std::collections::BTreeSet;

use common::{ontology_strategy, oracle, term_strategy};
use meso_core::matcher::{map_term, normalize_term, MatchCategory, TermMatcher};
use meso_core::ontology::{Concept, ConceptId, Ontology};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn category_and_ids_match_oracle(o in ontology_strategy(30), term in term_strategy()) {
        let r = map_term(&o, &term);
        let (category, allowed) = oracle(&o, &term);
        prop_assert_eq!(r.category, category);
        match category {
            MatchCategory::None => prop_assert!(r.matched_ids.is_empty()),
            MatchCategory::Exact => {
                prop_assert_eq!(r.matched_ids.len(), 1);
                prop_assert!(allowed.contains(&r.matched_ids[0]));
            }
            _ => {
                let got: BTreeSet<ConceptId> = r.matched_ids.iter().cloned().collect();
                prop_assert_eq!(got, allowed);
            }
        }
    }

    #[test]
    fn mapping_is_deterministic(o in ontology_strategy(15), term in term_strategy()) {
        let m = TermMatcher::new(&o);
        prop_assert_eq!(m.map_term(&term), m.map_term(&term));
        prop_assert_eq!(m.map_term(&term), map_term(&o, &term));
    }

    #[test]
    fn adding_equal_label_upgrades_to_exact(o in ontology_strategy(15), term in term_strategy()) {
        let words: Vec<String> = normalize_term(&term)
            .into_iter()
            .filter(|w| w != "of" && w != "the")
            .collect();
        prop_assume!(!words.is_empty());
        let mut unique = words.clone();
        unique.sort();
        unique.dedup();
        let label: String = unique
            .iter()
            .map(|w| {
                let mut c = w.chars();
                c.next().unwrap().to_uppercase().chain(c).collect::<String>()
            })
            .collect();
        let mut concepts: Vec<Concept> = o.concepts().cloned().collect();
        let id = ConceptId::from_number(concepts.len() as u32 + 1);
        concepts.push(Concept::new(id, label, Vec::new()));
        let bigger = Ontology::new("random", "1", concepts).unwrap();
        prop_assert_eq!(map_term(&bigger, &term).category, MatchCategory::Exact);
    }

    #[test]
    fn synonym_match_is_exact(o in ontology_strategy(15), pick in any::<usize>()) {
        let with_syn: Vec<&Concept> = o.concepts().filter(|c| !c.synonyms.is_empty()).collect();
        prop_assume!(!with_syn.is_empty());
        let c = with_syn[pick % with_syn.len()];
        let r = map_term(&o, &c.synonyms[0]);
        prop_assert_eq!(r.category, MatchCategory::Exact);
        prop_assert_eq!(map_term(&o, &c.label).category, MatchCategory::Exact);
    }
}

#[test]
fn exact_dominates_other_overlaps() {
    let id = ConceptId::from_number;
    let o = Ontology::new(
        "t",
        "1",
        vec![
            Concept::new(id(1), "Sleep", vec![]),
            Concept::new(id(2), "SleepDisturbance", vec![id(1)]),
            Concept::new(id(3), "Disturbance", vec![]),
        ],
    )
    .unwrap();
    let r = map_term(&o, "sleep disturbances");
    assert_eq!(r.category, MatchCategory::Exact);
    assert_eq!(r.matched_ids, [id(2)]);
}
