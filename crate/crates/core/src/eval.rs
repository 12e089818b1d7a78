//! Micro precision/recall/F1 for NER and RE, seed averaging and the
//! cross-dataset NER protocol.
//!
//! Matching is one-to-one: every prediction is either a true or a false
//! positive, every gold item either matched or missed, so
//! TP + FP = |pred| and TP + FN = |gold| exactly. Degenerate slices use the
//! 0/0 → 0 convention for precision, recall and F1.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::Span;
use crate::error::CoreError;
use crate::labels::SCIREX_ENTITY_TYPES;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Ner,
    Re,
}

/// An entity prediction or gold item on the shared sentence grid.
/// `sentence` is a corpus-wide sentence key (document index, sentence index
/// flattened by the caller).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EntityItem {
    pub sentence: usize,
    pub span: Span,
    pub entity_type: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelationItem {
    pub sentence: usize,
    pub head: Span,
    pub tail: Span,
    pub relation_type: String,
    pub head_type: String,
    pub tail_type: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedScore {
    pub seed: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub task: Task,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_seed: Vec<SeedScore>,
}

impl EvalResult {
    fn from_counts(task: Task, tp: usize, fp: usize, fn_count: usize) -> Self {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_count);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        EvalResult {
            task,
            precision,
            recall,
            f1,
            true_positives: tp,
            false_positives: fp,
            false_negatives: fn_count,
            per_seed: Vec::new(),
        }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn match_counts<K: std::hash::Hash + Eq>(
    pred_keys: Vec<K>,
    gold_keys: Vec<K>,
) -> (usize, usize, usize) {
    let gold_total = gold_keys.len();
    let mut remaining: HashMap<K, usize> = HashMap::new();
    for k in gold_keys {
        *remaining.entry(k).or_insert(0) += 1;
    }
    let mut tp = 0;
    let mut fp = 0;
    for k in pred_keys {
        match remaining.get_mut(&k) {
            Some(c) if *c > 0 => {
                *c -= 1;
                tp += 1;
            }
            _ => fp += 1,
        }
    }
    (tp, fp, gold_total - tp)
}

/// Exact-span NER scoring; `typed` additionally requires the entity types to
/// match.
pub fn score_ner(pred: &[EntityItem], gold: &[EntityItem], typed: bool) -> EvalResult {
    let key = |e: &EntityItem| {
        (
            e.sentence,
            e.span,
            if typed {
                e.entity_type.clone()
            } else {
                String::new()
            },
        )
    };
    let (tp, fp, fn_count) = match_counts(
        pred.iter().map(key).collect(),
        gold.iter().map(key).collect(),
    );
    EvalResult::from_counts(Task::Ner, tp, fp, fn_count)
}

/// A predicted relation is correct when head span, tail span and relation
/// type all match a gold relation. With `boundaries_only` the endpoint
/// entity types are ignored; otherwise they must match too.
pub fn score_re(pred: &[RelationItem], gold: &[RelationItem], boundaries_only: bool) -> EvalResult {
    let key = |r: &RelationItem| {
        (
            r.sentence,
            r.head,
            r.tail,
            r.relation_type.clone(),
            if boundaries_only {
                (String::new(), String::new())
            } else {
                (r.head_type.clone(), r.tail_type.clone())
            },
        )
    };
    let (tp, fp, fn_count) = match_counts(
        pred.iter().map(key).collect(),
        gold.iter().map(key).collect(),
    );
    EvalResult::from_counts(Task::Re, tp, fp, fn_count)
}

/// Cross-dataset NER protocol: predictions whose type is outside the four
/// shared SciREX types are discarded, then typed micro scoring applies.
pub fn score_scirex_cross(pred: &[EntityItem], gold: &[EntityItem]) -> EvalResult {
    let filtered: Vec<EntityItem> = pred
        .iter()
        .filter(|e| SCIREX_ENTITY_TYPES.contains(&e.entity_type.as_str()))
        .cloned()
        .collect();
    score_ner(&filtered, gold, true)
}

/// Arithmetic mean of precision, recall and F1 across seed runs; per-seed
/// values are retained, counts are totalled.
pub fn average_over_seeds(results: &[(u64, EvalResult)]) -> Result<EvalResult, CoreError> {
    if results.is_empty() {
        return Err(CoreError::EmptyInput);
    }
    let task = results[0].1.task;
    let n = results.len() as f64;
    let mut avg = EvalResult {
        task,
        precision: results.iter().map(|(_, r)| r.precision).sum::<f64>() / n,
        recall: results.iter().map(|(_, r)| r.recall).sum::<f64>() / n,
        f1: results.iter().map(|(_, r)| r.f1).sum::<f64>() / n,
        true_positives: results.iter().map(|(_, r)| r.true_positives).sum(),
        false_positives: results.iter().map(|(_, r)| r.false_positives).sum(),
        false_negatives: results.iter().map(|(_, r)| r.false_negatives).sum(),
        per_seed: Vec::new(),
    };
    avg.per_seed = results
        .iter()
        .map(|(seed, r)| SeedScore {
            seed: *seed,
            precision: r.precision,
            recall: r.recall,
            f1: r.f1,
        })
        .collect();
    Ok(avg)
}

/// Unweighted mean of the two test sets' scores.
pub fn average_sets(sem_result: &EvalResult, sci_result: &EvalResult) -> EvalResult {
    EvalResult {
        task: sem_result.task,
        precision: (sem_result.precision + sci_result.precision) / 2.0,
        recall: (sem_result.recall + sci_result.recall) / 2.0,
        f1: (sem_result.f1 + sci_result.f1) / 2.0,
        true_positives: sem_result.true_positives + sci_result.true_positives,
        false_positives: sem_result.false_positives + sci_result.false_positives,
        false_negatives: sem_result.false_negatives + sci_result.false_negatives,
        per_seed: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ent(sentence: usize, start: usize, end: usize, ty: &str) -> EntityItem {
        EntityItem {
            sentence,
            span: Span::new(start, end),
            entity_type: ty.into(),
        }
    }

    fn rel(sentence: usize, h: (usize, usize), t: (usize, usize), ty: &str) -> RelationItem {
        RelationItem {
            sentence,
            head: Span::new(h.0, h.1),
            tail: Span::new(t.0, t.1),
            relation_type: ty.into(),
            head_type: "Method".into(),
            tail_type: "Task".into(),
        }
    }

    #[test]
    fn perfect_prediction_scores_one() {
        let gold = vec![
            ent(0, 0, 1, "Method"),
            ent(0, 2, 4, "Task"),
            ent(1, 0, 2, "Metric"),
        ];
        let r = score_ner(&gold, &gold, true);
        assert_eq!((r.precision, r.recall, r.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn empty_prediction_scores_zero() {
        let gold = vec![ent(0, 0, 1, "Method")];
        let r = score_ner(&[], &gold, true);
        assert_eq!((r.precision, r.recall, r.f1), (0.0, 0.0, 0.0));
        assert_eq!(r.false_negatives, 1);
    }

    #[test]
    fn hand_counted_ner_oracle() {
        // 2 predictions, 1 correct, 3 gold: P = 1/2, R = 1/3, F1 = 0.4.
        let gold = vec![
            ent(0, 0, 1, "Method"),
            ent(0, 2, 4, "Task"),
            ent(1, 0, 2, "Metric"),
        ];
        let pred = vec![ent(0, 0, 1, "Method"), ent(0, 5, 6, "Task")];
        let r = score_ner(&pred, &gold, true);
        assert!((r.precision - 0.5).abs() < 1e-12);
        assert!((r.recall - 1.0 / 3.0).abs() < 1e-12);
        assert!((r.f1 - 0.4).abs() < 1e-12);
        assert_eq!(r.true_positives + r.false_positives, pred.len());
        assert_eq!(r.true_positives + r.false_negatives, gold.len());
    }

    #[test]
    fn untyped_matching_ignores_types() {
        let gold = vec![ent(0, 0, 1, "Method")];
        let pred = vec![ent(0, 0, 1, "Task")];
        assert_eq!(score_ner(&pred, &gold, true).f1, 0.0);
        assert_eq!(score_ner(&pred, &gold, false).f1, 1.0);
    }

    #[test]
    fn relation_type_mismatch_counts_both_ways() {
        let gold = vec![rel(0, (0, 1), (2, 3), "Used-for")];
        let pred = vec![rel(0, (0, 1), (2, 3), "Compare")];
        let r = score_re(&pred, &gold, true);
        assert_eq!(r.false_positives, 1);
        assert_eq!(r.false_negatives, 1);
    }

    #[test]
    fn hand_counted_re_oracle() {
        // 4 predictions, 2 correct, 5 gold: P = 0.5, R = 0.4, F1 = 4/9.
        let gold = vec![
            rel(0, (0, 1), (2, 3), "Used-for"),
            rel(0, (4, 5), (2, 3), "Compare"),
            rel(1, (0, 1), (2, 3), "Used-for"),
            rel(1, (0, 1), (4, 5), "Part-of"),
            rel(2, (0, 1), (2, 3), "Used-for"),
        ];
        let pred = vec![
            rel(0, (0, 1), (2, 3), "Used-for"),
            rel(1, (0, 1), (2, 3), "Used-for"),
            rel(1, (2, 3), (0, 1), "Used-for"),
            rel(2, (0, 1), (2, 3), "Compare"),
        ];
        let r = score_re(&pred, &gold, true);
        assert!((r.precision - 0.5).abs() < 1e-12);
        assert!((r.recall - 0.4).abs() < 1e-12);
        assert!((r.f1 - 4.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn strict_re_matching_requires_entity_types() {
        let gold = vec![rel(0, (0, 1), (2, 3), "Used-for")];
        let mut pred = gold.clone();
        pred[0].head_type = "Material".into();
        assert_eq!(score_re(&pred, &gold, true).f1, 1.0);
        assert_eq!(score_re(&pred, &gold, false).f1, 0.0);
    }

    #[test]
    fn spurious_prediction_never_raises_precision() {
        let gold = vec![ent(0, 0, 1, "Method"), ent(0, 2, 3, "Task")];
        let pred = vec![ent(0, 0, 1, "Method")];
        let base = score_ner(&pred, &gold, true);
        let mut more = pred.clone();
        more.push(ent(0, 5, 6, "Task"));
        let worse = score_ner(&more, &gold, true);
        assert!(worse.precision <= base.precision);
        assert_eq!(worse.recall, base.recall);
    }

    #[test]
    fn scirex_cross_discards_foreign_types() {
        let gold = vec![
            ent(0, 0, 1, "Method"),
            ent(0, 2, 3, "Metric"),
            ent(0, 4, 5, "Metric"),
        ];
        // One Method TP, one OtherScientificTerm discarded, one Task FP.
        let pred = vec![
            ent(0, 0, 1, "Method"),
            ent(0, 6, 7, "OtherScientificTerm"),
            ent(0, 8, 9, "Task"),
        ];
        let r = score_scirex_cross(&pred, &gold);
        assert!((r.precision - 0.5).abs() < 1e-12);
        assert!((r.recall - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn all_discarded_predictions_score_zero() {
        let gold = vec![ent(0, 0, 1, "Method")];
        let pred = vec![ent(0, 0, 1, "OtherScientificTerm")];
        let r = score_scirex_cross(&pred, &gold);
        assert_eq!((r.precision, r.recall), (0.0, 0.0));
    }

    #[test]
    fn seed_average_is_arithmetic_mean() {
        let a = EvalResult::from_counts(Task::Re, 1, 4, 4); // P=0.2, R=0.2, F1=0.2
        let b = EvalResult::from_counts(Task::Re, 2, 3, 3); // P=0.4, R=0.4, F1=0.4
        let avg = average_over_seeds(&[(1, a), (2, b)]).unwrap();
        assert!((avg.f1 - 0.3).abs() < 1e-12);
        assert_eq!(avg.per_seed.len(), 2);
        assert!(average_over_seeds(&[]).is_err());
    }

    #[test]
    fn singleton_average_is_identity() {
        let a = EvalResult::from_counts(Task::Ner, 3, 1, 2);
        let avg = average_over_seeds(&[(7, a.clone())]).unwrap();
        assert_eq!(
            (avg.precision, avg.recall, avg.f1),
            (a.precision, a.recall, a.f1)
        );
    }

    #[test]
    fn set_average_reproduces_reported_mean() {
        // 22.37 and 39.66 average to 31.02 within rounding.
        let sem = EvalResult {
            f1: 0.2237,
            ..EvalResult::from_counts(Task::Re, 0, 0, 0)
        };
        let sci = EvalResult {
            f1: 0.3966,
            ..EvalResult::from_counts(Task::Re, 0, 0, 0)
        };
        let avg = average_sets(&sem, &sci);
        assert!((avg.f1 * 100.0 - 31.02).abs() < 0.01);
    }

    #[test]
    fn set_average_edge_cases() {
        let zero = EvalResult::from_counts(Task::Re, 0, 1, 1);
        let x = EvalResult {
            f1: 0.5,
            ..zero.clone()
        };
        assert_eq!(average_sets(&zero, &x).f1, 0.25);
        assert_eq!(average_sets(&x, &x).f1, x.f1);
    }
}
