//! Inference: spans whose argmax class is not NONE become entities; ordered
//! pairs of predicted entities whose clamped relation score reaches the
//! per-class threshold become relations.

use sciie_core::builder::HeadId;
use sciie_core::softlabel::{sigmoid, softmax, EPS};
use sciie_core::Span;

use crate::autodiff::Graph;
use crate::sampling::enumerate_spans;
use crate::spert::JointModel;

#[derive(Debug, Clone, PartialEq)]
pub struct PredictedEntity {
    pub span: Span,
    pub entity_type: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictedRelation {
    pub head: Span,
    pub tail: Span,
    pub relation_type: String,
    pub head_type: String,
    pub tail_type: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Prediction {
    pub entities: Vec<PredictedEntity>,
    pub relations: Vec<PredictedRelation>,
}

impl JointModel {
    pub fn predict(&self, tokens: &[&str], head: HeadId) -> Prediction {
        self.predict_with_threshold(tokens, head, self.config.relation_threshold)
    }

    pub fn predict_with_threshold(
        &self,
        tokens: &[&str],
        head: HeadId,
        threshold: f64,
    ) -> Prediction {
        if tokens.is_empty() {
            return Prediction::default();
        }
        let schema = self.config.schema(head);
        let mut g = Graph::new(&self.params);
        let mut state = self.encode_sentence(&mut g, tokens);

        let mut entities: Vec<PredictedEntity> = Vec::new();
        for span in enumerate_spans(tokens.len(), self.config.max_span_width) {
            let rep = self.span_rep(&mut g, &mut state, span);
            let logits = self.entity_logits(&mut g, head, rep);
            let probs = softmax(g.value(logits));
            let (best, &score) = probs
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .expect("non-empty class set");
            if best != schema.none_index() {
                entities.push(PredictedEntity {
                    span,
                    entity_type: schema.entity_types[best].clone(),
                    score,
                });
            }
        }

        let mut relations = Vec::new();
        for a in &entities {
            for b in &entities {
                if a.span == b.span {
                    continue;
                }
                let rep = self.relation_rep(&mut g, &mut state, a.span, b.span);
                let logits = self.relation_logits(&mut g, head, rep);
                for (k, &z) in g.value(logits).iter().enumerate() {
                    // Squashed scores live strictly inside (0, 1).
                    let score = sigmoid(z).clamp(EPS, 1.0 - EPS);
                    if score >= threshold {
                        relations.push(PredictedRelation {
                            head: a.span,
                            tail: b.span,
                            relation_type: schema.relation_types[k].clone(),
                            head_type: a.entity_type.clone(),
                            tail_type: b.entity_type.clone(),
                            score,
                        });
                    }
                }
            }
        }

        Prediction {
            entities,
            relations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::Vocab;
    use crate::spert::{HeadSchema, ModelConfig};

    fn tiny_model() -> JointModel {
        let mut cfg = ModelConfig::desk_scale(
            HeadSchema {
                entity_types: vec!["Method".into()],
                relation_types: vec!["Used-for".into()],
            },
            HeadSchema {
                entity_types: vec!["ENTITY".into()],
                relation_types: vec!["Usage".into()],
            },
        );
        cfg.encoder_dim = 6;
        cfg.width_dim = 3;
        cfg.max_span_width = 3;
        let s = ["a", "b", "c"];
        JointModel::with_tiny_encoder(cfg, Vocab::build([&s[..]]), 11)
    }

    #[test]
    fn empty_sentence_predicts_nothing() {
        let model = tiny_model();
        let p = model.predict(&[], HeadId::Sci);
        assert!(p.entities.is_empty() && p.relations.is_empty());
    }

    #[test]
    fn threshold_one_yields_no_relations() {
        let model = tiny_model();
        let p = model.predict_with_threshold(&["a", "b", "c"], HeadId::Sci, 1.0);
        assert!(p.relations.is_empty());
    }

    #[test]
    fn prediction_is_deterministic() {
        let model = tiny_model();
        let a = model.predict(&["a", "b", "c"], HeadId::Sem);
        let b = model.predict(&["a", "b", "c"], HeadId::Sem);
        assert_eq!(a, b);
    }
}
