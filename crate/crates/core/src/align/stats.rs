//! Corpus statistics over aligned documents: overlap report, common-relation
//! distribution and entity-pair co-occurrence tables.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::align::{AlignedDocument, MatchKind};
use crate::corpus::Perspective;
use crate::error::CoreError;
use crate::labels::{is_common_relation, OTHER_SCIENTIFIC_TERM_2};
use crate::softlabel::Agreement;

/// Counts of relation label k between entity-type pairs (i as argument 1,
/// j as argument 2), plus the marginal argument counts. The co-occurrence
/// score is O(i,j,k) = A(i,j,k) / (N1_i + N2_j); it depends only on these
/// aggregate counts, so accumulation commutes over documents.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CooccurrenceTable {
    /// A(e_i, e_j)^{r_k}: (arg1 type, arg2 type, relation) -> count.
    #[serde(with = "triple_map")]
    pub counts: BTreeMap<(String, String, String), u64>,
    /// N1: times a type occurs as argument 1 of any relation.
    pub n1: BTreeMap<String, u64>,
    /// N2: times a type occurs as argument 2.
    pub n2: BTreeMap<String, u64>,
}

/// JSON needs string keys; the triple-keyed count map serializes as an
/// array of (arg1, arg2, relation, count) rows.
mod triple_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    type Key = (String, String, String);

    pub fn serialize<S: Serializer>(map: &BTreeMap<Key, u64>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<(&String, &String, &String, u64)> =
            map.iter().map(|((a, b, c), v)| (a, b, c, *v)).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Key, u64>, D::Error> {
        let rows = Vec::<(String, String, String, u64)>::deserialize(d)?;
        Ok(rows
            .into_iter()
            .map(|(a, b, c, v)| ((a, b, c), v))
            .collect())
    }
}

impl CooccurrenceTable {
    /// Accumulate counts for one perspective's relations over the aligned
    /// corpora. Entity types come from SciERC; SemEval mentions take the
    /// type of their exact-matched SciERC partner and fall back to
    /// `OtherScientificTerm_2` when no partner shares the boundaries.
    pub fn from_aligned(docs: &[AlignedDocument], perspective: Perspective) -> Self {
        let mut table = CooccurrenceTable::default();
        for pair in docs {
            let doc = match perspective {
                Perspective::Sci => &pair.sci_doc,
                Perspective::Sem => &pair.sem_doc,
            };
            for (si, sent) in doc.sentences.iter().enumerate() {
                for rel in &sent.relations {
                    let type_of = |id: &str| -> String {
                        match perspective {
                            Perspective::Sci => sent
                                .entity(id)
                                .map(|e| e.entity_type.clone())
                                .unwrap_or_else(|| OTHER_SCIENTIFIC_TERM_2.to_string()),
                            Perspective::Sem => pair
                                .entity_matches
                                .iter()
                                .find(|m| {
                                    m.sentence == si && m.kind == MatchKind::Exact && m.sem_id == id
                                })
                                .and_then(|m| {
                                    pair.sci_doc.sentences[si]
                                        .entity(&m.sci_id)
                                        .map(|e| e.entity_type.clone())
                                })
                                .unwrap_or_else(|| OTHER_SCIENTIFIC_TERM_2.to_string()),
                        }
                    };
                    let t1 = type_of(&rel.head);
                    let t2 = type_of(&rel.tail);
                    *table
                        .counts
                        .entry((t1.clone(), t2.clone(), rel.relation_type.clone()))
                        .or_insert(0) += 1;
                    *table.n1.entry(t1).or_insert(0) += 1;
                    *table.n2.entry(t2).or_insert(0) += 1;
                }
            }
        }
        table
    }

    pub fn count(&self, arg1: &str, arg2: &str, relation: &str) -> u64 {
        self.counts
            .get(&(arg1.to_string(), arg2.to_string(), relation.to_string()))
            .copied()
            .unwrap_or(0)
    }

    /// O(i,j,k) = A(i,j,k) / (N1_i + N2_j).
    pub fn score(&self, arg1: &str, arg2: &str, relation: &str) -> Result<f64, CoreError> {
        let denom =
            self.n1.get(arg1).copied().unwrap_or(0) + self.n2.get(arg2).copied().unwrap_or(0);
        if denom == 0 {
            return Err(CoreError::UndefinedScore {
                arg1: arg1.to_string(),
                arg2: arg2.to_string(),
            });
        }
        Ok(self.count(arg1, arg2, relation) as f64 / denom as f64)
    }

    /// Entity-pair cell with the highest score for one relation label.
    pub fn argmax_pair(&self, relation: &str) -> Option<(String, String)> {
        self.counts
            .iter()
            .filter(|((_, _, k), _)| k == relation)
            .filter_map(|((i, j, _), _)| {
                self.score(i, j, relation)
                    .ok()
                    .map(|s| (i.clone(), j.clone(), s))
            })
            .max_by(|a, b| {
                a.2.partial_cmp(&b.2)
                    .unwrap()
                    .then(b.0.cmp(&a.0))
                    .then(b.1.cmp(&a.1))
            })
            .map(|(i, j, _)| (i, j))
    }

    /// Dense matrix of scores for one relation over the given type order,
    /// suitable for heatmap emission.
    pub fn matrix(&self, relation: &str, types: &[String]) -> Vec<Vec<f64>> {
        types
            .iter()
            .map(|t1| {
                types
                    .iter()
                    .map(|t2| self.score(t1, t2, relation).unwrap_or(0.0))
                    .collect()
            })
            .collect()
    }

    /// All entity types appearing in the table, sorted.
    pub fn type_order(&self) -> Vec<String> {
        let mut set: Vec<String> = self
            .counts
            .keys()
            .flat_map(|(i, j, _)| [i.clone(), j.clone()])
            .collect();
        set.sort();
        set.dedup();
        set
    }
}

/// Per-label counts of the five common relations, one map per perspective.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationDistribution {
    pub sem: BTreeMap<String, u64>,
    pub sci: BTreeMap<String, u64>,
}

/// Aggregate statistics over the aligned portion of the corpora.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub aligned_documents: usize,
    pub sem_entities: usize,
    pub sci_entities: usize,
    pub sem_relations: usize,
    pub sci_relations: usize,
    /// Relations whose label is one of the five mapped types.
    pub sem_common_relations: usize,
    pub sci_common_relations: usize,
    /// Stricter reading: common label AND both endpoints exact-matched
    /// across perspectives (reported alongside for comparison).
    pub sem_matched_common_relations: usize,
    pub sci_matched_common_relations: usize,
    pub verdicts_high: usize,
    pub verdicts_medium: usize,
    pub verdicts_low: usize,
    pub relation_distribution: RelationDistribution,
}

pub fn overlap_statistics(aligned: &[AlignedDocument]) -> OverlapReport {
    let mut report = OverlapReport {
        aligned_documents: aligned.len(),
        sem_entities: 0,
        sci_entities: 0,
        sem_relations: 0,
        sci_relations: 0,
        sem_common_relations: 0,
        sci_common_relations: 0,
        sem_matched_common_relations: 0,
        sci_matched_common_relations: 0,
        verdicts_high: 0,
        verdicts_medium: 0,
        verdicts_low: 0,
        relation_distribution: RelationDistribution::default(),
    };

    for pair in aligned {
        report.sem_entities += pair.sem_doc.entity_count();
        report.sci_entities += pair.sci_doc.entity_count();
        report.sem_relations += pair.sem_doc.relation_count();
        report.sci_relations += pair.sci_doc.relation_count();

        for (si, sent) in pair.sem_doc.sentences.iter().enumerate() {
            for rel in &sent.relations {
                if is_common_relation(&rel.relation_type) {
                    report.sem_common_relations += 1;
                    *report
                        .relation_distribution
                        .sem
                        .entry(rel.relation_type.clone())
                        .or_insert(0) += 1;
                    let both_matched = pair.exact_sci_partner(si, &rel.head).is_some()
                        && pair.exact_sci_partner(si, &rel.tail).is_some();
                    if both_matched {
                        report.sem_matched_common_relations += 1;
                    }
                }
            }
        }
        for (si, sent) in pair.sci_doc.sentences.iter().enumerate() {
            for rel in &sent.relations {
                if is_common_relation(&rel.relation_type) {
                    report.sci_common_relations += 1;
                    *report
                        .relation_distribution
                        .sci
                        .entry(rel.relation_type.clone())
                        .or_insert(0) += 1;
                    let matched_back = |id: &str| {
                        pair.entity_matches.iter().any(|m| {
                            m.sentence == si && m.kind == MatchKind::Exact && m.sci_id == id
                        })
                    };
                    if matched_back(&rel.head) && matched_back(&rel.tail) {
                        report.sci_matched_common_relations += 1;
                    }
                }
            }
        }
        for v in &pair.relation_verdicts {
            match v.agreement {
                Agreement::High => report.verdicts_high += 1,
                Agreement::Medium => report.verdicts_medium += 1,
                Agreement::Low => report.verdicts_low += 1,
            }
        }
    }

    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn direct_substitution_score() {
        let mut table = CooccurrenceTable::default();
        table
            .counts
            .insert(("Method".into(), "Method".into(), "Compare".into()), 3);
        table.n1.insert("Method".into(), 10);
        table.n2.insert("Method".into(), 5);
        assert!((table.score("Method", "Method", "Compare").unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn zero_count_scores_zero() {
        let mut table = CooccurrenceTable::default();
        table.n1.insert("Task".into(), 4);
        table.n2.insert("Task".into(), 4);
        assert_eq!(table.score("Task", "Task", "Compare").unwrap(), 0.0);
    }

    #[test]
    fn zero_denominator_is_undefined() {
        let table = CooccurrenceTable::default();
        assert!(matches!(
            table.score("Method", "Task", "Compare"),
            Err(CoreError::UndefinedScore { .. })
        ));
    }

    #[test]
    fn accumulation_is_permutation_invariant() {
        let aligned = fixtures::table2_aligned();
        let forward = CooccurrenceTable::from_aligned(&aligned, Perspective::Sci);
        let mut reversed = aligned;
        reversed.reverse();
        let backward = CooccurrenceTable::from_aligned(&reversed, Perspective::Sci);
        assert_eq!(forward, backward);
    }

    #[test]
    fn overlap_report_counts_table2_fixture() {
        let aligned = fixtures::table2_aligned();
        let report = overlap_statistics(&aligned);
        assert_eq!(report.aligned_documents, 4);
        assert_eq!(report.sem_entities, 8);
        assert_eq!(report.sci_entities, 9);
        assert_eq!(report.sem_relations, 3);
        assert_eq!(report.sci_relations, 4);
        // Sem: Usage, Model, Part-whole all mapped; sci: all four mapped.
        assert_eq!(report.sem_common_relations, 3);
        assert_eq!(report.sci_common_relations, 4);
        assert_eq!(report.verdicts_high, 1);
        assert_eq!(report.verdicts_low, 1);
        assert_eq!(report.verdicts_medium, 3);
    }
}
