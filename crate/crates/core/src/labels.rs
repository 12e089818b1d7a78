//! Label schemas for the three source datasets and the five-pair relation
//! mapping that connects the SemEval and SciERC annotation schemes.

use serde::{Deserialize, Serialize};

use crate::corpus::Perspective;

/// Type label carried by entities that have no native type (SemEval mentions).
pub const ENTITY_UNTYPED: &str = "ENTITY";

/// Entity label used for SemEval mentions in the SciREX cross-dataset setup.
pub const OTHER_SCIENTIFIC_TERM_2: &str = "OtherScientificTerm_2";

pub const SCIERC_ENTITY_TYPES: [&str; 6] = [
    "Method",
    "Metric",
    "Task",
    "Material",
    "Generic",
    "OtherScientificTerm",
];

pub const SCIERC_RELATION_TYPES: [&str; 7] = [
    "Used-for",
    "Evaluate-for",
    "Feature-of",
    "Part-of",
    "Compare",
    "Hyponym-of",
    "Conjunction",
];

pub const SEMEVAL_RELATION_TYPES: [&str; 6] = [
    "Usage",
    "Result",
    "Model",
    "Part-whole",
    "Topic",
    "Comparison",
];

pub const SCIREX_ENTITY_TYPES: [&str; 4] = ["Method", "Task", "Metric", "Material"];

/// The five relation pairs shared by the two schemes, (SemEval, SciERC).
pub const COMMON_RELATION_PAIRS: [(&str, &str); 5] = [
    ("Comparison", "Compare"),
    ("Usage", "Used-for"),
    ("Part-whole", "Part-of"),
    ("Model", "Feature-of"),
    ("Result", "Evaluate-for"),
];

/// Class order used for soft-label vectors over the five common relations,
/// in SciERC naming.
pub const COMMON_RELATION_ORDER_SCI: [&str; 5] = [
    "Used-for",
    "Compare",
    "Feature-of",
    "Part-of",
    "Evaluate-for",
];

/// Same class order in SemEval naming.
pub const COMMON_RELATION_ORDER_SEM: [&str; 5] =
    ["Usage", "Comparison", "Model", "Part-whole", "Result"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MappingDirection {
    SemToSci,
    SciToSem,
}

impl MappingDirection {
    pub fn reverse(self) -> Self {
        match self {
            MappingDirection::SemToSci => MappingDirection::SciToSem,
            MappingDirection::SciToSem => MappingDirection::SemToSci,
        }
    }
}

/// Map a relation label across perspectives. Returns `None` for labels
/// outside the five mapped pairs (Topic, Conjunction, Hyponym-of).
pub fn map_relation_label(label: &str, direction: MappingDirection) -> Option<&'static str> {
    COMMON_RELATION_PAIRS
        .iter()
        .find_map(|&(sem, sci)| match direction {
            MappingDirection::SemToSci if label == sem => Some(sci),
            MappingDirection::SciToSem if label == sci => Some(sem),
            _ => None,
        })
}

/// True if the label is one of the five common relations in either naming.
pub fn is_common_relation(label: &str) -> bool {
    COMMON_RELATION_PAIRS
        .iter()
        .any(|&(sem, sci)| label == sem || label == sci)
}

/// Declared entity and relation labels for one annotation perspective.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSchema {
    pub perspective: Perspective,
    pub entity_types: Vec<String>,
    pub relation_types: Vec<String>,
}

impl LabelSchema {
    pub fn scierc() -> Self {
        LabelSchema {
            perspective: Perspective::Sci,
            entity_types: SCIERC_ENTITY_TYPES.iter().map(|s| s.to_string()).collect(),
            relation_types: SCIERC_RELATION_TYPES
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }

    /// SemEval mentions are untyped; they carry the single ENTITY label.
    pub fn semeval() -> Self {
        LabelSchema {
            perspective: Perspective::Sem,
            entity_types: vec![ENTITY_UNTYPED.to_string()],
            relation_types: SEMEVAL_RELATION_TYPES
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }

    /// Five common relations only, entity types erased to ENTITY.
    pub fn common5(perspective: Perspective) -> Self {
        let relation_types = match perspective {
            Perspective::Sci => COMMON_RELATION_ORDER_SCI,
            Perspective::Sem => COMMON_RELATION_ORDER_SEM,
        };
        LabelSchema {
            perspective,
            entity_types: vec![ENTITY_UNTYPED.to_string()],
            relation_types: relation_types.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn relation_index(&self, label: &str) -> Option<usize> {
        self.relation_types.iter().position(|l| l == label)
    }

    pub fn entity_index(&self, label: &str) -> Option<usize> {
        self.entity_types.iter().position(|l| l == label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maps_the_five_common_pairs() {
        assert_eq!(
            map_relation_label("Usage", MappingDirection::SemToSci),
            Some("Used-for")
        );
        assert_eq!(
            map_relation_label("Compare", MappingDirection::SciToSem),
            Some("Comparison")
        );
        assert_eq!(
            map_relation_label("Model", MappingDirection::SemToSci),
            Some("Feature-of")
        );
        assert_eq!(
            map_relation_label("Part-of", MappingDirection::SciToSem),
            Some("Part-whole")
        );
        assert_eq!(
            map_relation_label("Result", MappingDirection::SemToSci),
            Some("Evaluate-for")
        );
    }

    #[test]
    fn unmapped_labels_are_absent() {
        assert_eq!(
            map_relation_label("Conjunction", MappingDirection::SciToSem),
            None
        );
        assert_eq!(
            map_relation_label("Hyponym-of", MappingDirection::SciToSem),
            None
        );
        assert_eq!(
            map_relation_label("Topic", MappingDirection::SemToSci),
            None
        );
    }

    #[test]
    fn mapping_round_trips() {
        for (sem, sci) in COMMON_RELATION_PAIRS {
            let there = map_relation_label(sem, MappingDirection::SemToSci).unwrap();
            assert_eq!(there, sci);
            let back = map_relation_label(there, MappingDirection::SciToSem).unwrap();
            assert_eq!(back, sem);
        }
    }
}
