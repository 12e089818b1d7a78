//! Span-based joint entity/relation extractor with two perspective heads.
//!
//! A shared encoder feeds span representations (max-pooled token vectors,
//! width-bucket embedding, sequence context) into per-perspective entity
//! classifiers, and relation-candidate representations (head span rep, tail
//! span rep, localized context between them) into per-perspective relation
//! classifiers. Each relation head additionally owns a log-normalized
//! auxiliary projection that the soft-label divergences read.

use std::collections::{BTreeMap, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use sciie_core::builder::{HeadId, TrainingExample};
use sciie_core::softlabel::{Divergence, SoftLabel};
use sciie_core::Span;

use crate::autodiff::{Graph, ParamId, ParamSet, Var};
use crate::encoder::{EncoderContract, FrozenVectorEncoder, TinyEncoder, Vocab};
use crate::error::ModelError;
use crate::sampling::{derive_seed, sample_negatives};

/// Entity and relation label inventory of one head. The entity classifier
/// adds a NONE class after the declared types.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeadSchema {
    pub entity_types: Vec<String>,
    pub relation_types: Vec<String>,
}

impl HeadSchema {
    pub fn entity_class_count(&self) -> usize {
        self.entity_types.len() + 1
    }

    pub fn none_index(&self) -> usize {
        self.entity_types.len()
    }

    pub fn relation_class_count(&self) -> usize {
        self.relation_types.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub encoder_dim: usize,
    pub width_dim: usize,
    pub max_span_width: usize,
    pub neg_entity_count: usize,
    pub neg_relation_count: usize,
    pub relation_threshold: f64,
    pub sci_schema: HeadSchema,
    pub sem_schema: HeadSchema,
    /// Divergence for the soft-label auxiliary loss; `None` disables it.
    pub divergence: Option<Divergence>,
    /// Extend the soft loss to entity heads (off by default).
    pub soft_on_entities: bool,
}

impl ModelConfig {
    /// Desk-scale defaults around the usual span-model settings: maximum
    /// span width 10, width embedding 25, 100 entity and 100 relation
    /// negatives, relation threshold 0.4.
    pub fn desk_scale(sci_schema: HeadSchema, sem_schema: HeadSchema) -> Self {
        ModelConfig {
            encoder_dim: 32,
            width_dim: 25,
            max_span_width: 10,
            neg_entity_count: 100,
            neg_relation_count: 100,
            relation_threshold: 0.4,
            sci_schema,
            sem_schema,
            divergence: None,
            soft_on_entities: false,
        }
    }

    pub fn schema(&self, head: HeadId) -> &HeadSchema {
        match head {
            HeadId::Sci => &self.sci_schema,
            HeadId::Sem => &self.sem_schema,
        }
    }

    pub fn span_rep_dim(&self) -> usize {
        2 * self.encoder_dim + self.width_dim
    }

    pub fn relation_rep_dim(&self) -> usize {
        2 * self.span_rep_dim() + self.encoder_dim
    }
}

pub enum AnyEncoder {
    Tiny(TinyEncoder),
    Frozen(FrozenVectorEncoder),
}

impl EncoderContract for AnyEncoder {
    fn identifier(&self) -> &str {
        match self {
            AnyEncoder::Tiny(e) => e.identifier(),
            AnyEncoder::Frozen(e) => e.identifier(),
        }
    }

    fn dim(&self) -> usize {
        match self {
            AnyEncoder::Tiny(e) => e.dim(),
            AnyEncoder::Frozen(e) => e.dim(),
        }
    }

    fn trainable(&self) -> bool {
        match self {
            AnyEncoder::Tiny(e) => e.trainable(),
            AnyEncoder::Frozen(e) => e.trainable(),
        }
    }

    fn encode(&self, g: &mut Graph<'_>, tokens: &[&str]) -> (Vec<Var>, Var) {
        match self {
            AnyEncoder::Tiny(e) => e.encode(g, tokens),
            AnyEncoder::Frozen(e) => e.encode(g, tokens),
        }
    }
}

struct HeadParams {
    w_ent: ParamId,
    b_ent: ParamId,
    w_rel: ParamId,
    b_rel: ParamId,
    w_aux: ParamId,
    b_aux: ParamId,
    aux_ent: Option<(ParamId, ParamId)>,
}

pub struct JointModel {
    pub config: ModelConfig,
    pub params: ParamSet,
    pub seed: u64,
    encoder: AnyEncoder,
    width_embedding: ParamId,
    sci_head: HeadParams,
    sem_head: HeadParams,
}

impl JointModel {
    /// Trainable desk-scale model: tiny encoder over the given vocabulary.
    pub fn with_tiny_encoder(config: ModelConfig, vocab: Vocab, seed: u64) -> Self {
        let mut params = ParamSet::new();
        let encoder = AnyEncoder::Tiny(TinyEncoder::new(
            vocab,
            config.encoder_dim,
            &mut params,
            seed,
        ));
        Self::finish(config, params, encoder, seed)
    }

    /// Frozen pretrained vectors behind the same contract. The vector
    /// dimension becomes the encoder dimension.
    pub fn with_frozen_encoder(
        mut config: ModelConfig,
        vectors_text: &str,
        seed: u64,
    ) -> Result<Self, ModelError> {
        let enc = FrozenVectorEncoder::from_text(vectors_text)?;
        config.encoder_dim = enc.dim();
        Ok(Self::finish(
            config,
            ParamSet::new(),
            AnyEncoder::Frozen(enc),
            seed,
        ))
    }

    fn finish(config: ModelConfig, mut params: ParamSet, encoder: AnyEncoder, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED_CAFE);
        let width_embedding = params.add(
            "width_embedding",
            config.max_span_width,
            config.width_dim,
            &mut rng,
        );

        let mut head = |tag: &str, schema: &HeadSchema| -> HeadParams {
            let span_dim = config.span_rep_dim();
            let rel_dim = config.relation_rep_dim();
            HeadParams {
                w_ent: params.add(
                    &format!("{tag}.w_ent"),
                    schema.entity_class_count(),
                    span_dim,
                    &mut rng,
                ),
                b_ent: params.add_zeros(&format!("{tag}.b_ent"), schema.entity_class_count(), 1),
                w_rel: params.add(
                    &format!("{tag}.w_rel"),
                    schema.relation_class_count(),
                    rel_dim,
                    &mut rng,
                ),
                b_rel: params.add_zeros(&format!("{tag}.b_rel"), schema.relation_class_count(), 1),
                w_aux: params.add(
                    &format!("{tag}.w_aux"),
                    schema.relation_class_count(),
                    rel_dim,
                    &mut rng,
                ),
                b_aux: params.add_zeros(&format!("{tag}.b_aux"), schema.relation_class_count(), 1),
                aux_ent: config.soft_on_entities.then(|| {
                    (
                        params.add(
                            &format!("{tag}.w_aux_ent"),
                            schema.entity_class_count(),
                            span_dim,
                            &mut rng,
                        ),
                        params.add_zeros(
                            &format!("{tag}.b_aux_ent"),
                            schema.entity_class_count(),
                            1,
                        ),
                    )
                }),
            }
        };
        let sci_head = head("sci", &config.sci_schema);
        let sem_head = head("sem", &config.sem_schema);

        JointModel {
            config,
            params,
            seed,
            encoder,
            width_embedding,
            sci_head,
            sem_head,
        }
    }

    pub fn encoder(&self) -> &AnyEncoder {
        &self.encoder
    }

    fn head_params(&self, head: HeadId) -> &HeadParams {
        match head {
            HeadId::Sci => &self.sci_head,
            HeadId::Sem => &self.sem_head,
        }
    }
}

/// Per-sentence forward state: encoder outputs plus caches so each span and
/// candidate pair is built once.
pub struct SentenceState {
    token_vecs: Vec<Var>,
    context: Var,
    span_reps: HashMap<Span, Var>,
    rel_reps: HashMap<(Span, Span), Var>,
}

impl JointModel {
    pub fn encode_sentence(&self, g: &mut Graph<'_>, tokens: &[&str]) -> SentenceState {
        let (token_vecs, context) = self.encoder.encode(g, tokens);
        SentenceState {
            token_vecs,
            context,
            span_reps: HashMap::new(),
            rel_reps: HashMap::new(),
        }
    }

    /// Max-pooled span tokens ++ width-bucket embedding ++ sentence context.
    pub fn span_rep(&self, g: &mut Graph<'_>, state: &mut SentenceState, span: Span) -> Var {
        if let Some(&v) = state.span_reps.get(&span) {
            return v;
        }
        let pooled = g.max_pool(&state.token_vecs[span.start..span.end]);
        let bucket = span.width().min(self.config.max_span_width) - 1;
        let width = g.param_row(self.width_embedding, bucket);
        let rep = g.concat(&[pooled, width, state.context]);
        state.span_reps.insert(span, rep);
        rep
    }

    /// Head span rep ++ tail span rep ++ localized context (max-pool over
    /// tokens strictly between the spans, zero vector if none).
    pub fn relation_rep(
        &self,
        g: &mut Graph<'_>,
        state: &mut SentenceState,
        head: Span,
        tail: Span,
    ) -> Var {
        if let Some(&v) = state.rel_reps.get(&(head, tail)) {
            return v;
        }
        let head_rep = self.span_rep(g, state, head);
        let tail_rep = self.span_rep(g, state, tail);
        let between = if head.end < tail.start {
            Some((head.end, tail.start))
        } else if tail.end < head.start {
            Some((tail.end, head.start))
        } else {
            None
        };
        let context = match between {
            Some((s, e)) if s < e => g.max_pool(&state.token_vecs[s..e]),
            _ => g.zeros(self.config.encoder_dim),
        };
        let rep = g.concat(&[head_rep, tail_rep, context]);
        state.rel_reps.insert((head, tail), rep);
        rep
    }

    pub fn entity_logits(&self, g: &mut Graph<'_>, head: HeadId, rep: Var) -> Var {
        let p = self.head_params(head);
        g.affine(p.w_ent, p.b_ent, rep)
    }

    pub fn relation_logits(&self, g: &mut Graph<'_>, head: HeadId, rep: Var) -> Var {
        let p = self.head_params(head);
        g.affine(p.w_rel, p.b_rel, rep)
    }

    /// Raw scores of the dedicated auxiliary projection; the divergence ops
    /// normalize them (softmax / per-class sigmoid) internally.
    pub fn aux_relation_logits(&self, g: &mut Graph<'_>, head: HeadId, rep: Var) -> Var {
        let p = self.head_params(head);
        g.affine(p.w_aux, p.b_aux, rep)
    }

    pub fn aux_entity_logits(&self, g: &mut Graph<'_>, head: HeadId, rep: Var) -> Option<Var> {
        let p = self.head_params(head);
        p.aux_ent.map(|(w, b)| g.affine(w, b, rep))
    }
}

/// Candidate sets of one head for one sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct HeadCandidates {
    /// (span, entity class index); gold classes first, sampled NONE spans
    /// after.
    pub entity_spans: Vec<(Span, usize)>,
    /// ((head span, tail span), multi-hot relation target).
    pub relation_pairs: Vec<((Span, Span), Vec<f64>)>,
    /// Soft-labeled relation candidates.
    pub soft_relations: Vec<(Span, Span, SoftLabel)>,
    /// Soft-labeled entity candidates (entity-head extension only).
    pub soft_entities: Vec<(Span, SoftLabel)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreparedExample {
    pub tokens: Vec<String>,
    pub heads: BTreeMap<HeadId, HeadCandidates>,
}

/// Turn a training example into deterministic per-head candidate sets:
/// gold annotations plus sampled negatives.
pub fn prepare_example(
    example: &TrainingExample,
    config: &ModelConfig,
    seed: u64,
) -> Result<PreparedExample, ModelError> {
    let n = example.tokens.len();
    let mut heads = BTreeMap::new();

    for (hi, head) in [HeadId::Sci, HeadId::Sem].into_iter().enumerate() {
        let Some(anns) = example.head(head) else {
            continue;
        };
        let schema = config.schema(head);

        let mut entity_spans = Vec::new();
        let mut span_of: HashMap<&str, Span> = HashMap::new();
        for e in &anns.entities {
            let class = schema
                .entity_types
                .iter()
                .position(|t| t == &e.entity_type)
                .ok_or_else(|| {
                    ModelError::Train(format!(
                        "entity type {:?} not in the {head:?} head schema",
                        e.entity_type
                    ))
                })?;
            if e.span.end > n || e.span.start >= e.span.end {
                return Err(ModelError::Train(format!(
                    "entity {} span {} out of bounds for sentence of {n} tokens",
                    e.id, e.span
                )));
            }
            span_of.insert(e.id.as_str(), e.span);
            entity_spans.push((e.span, class));
        }

        let mut pair_targets: BTreeMap<(Span, Span), Vec<f64>> = BTreeMap::new();
        for r in &anns.relations {
            let class = schema
                .relation_types
                .iter()
                .position(|t| t == &r.relation_type)
                .ok_or_else(|| {
                    ModelError::Train(format!(
                        "relation type {:?} not in the {head:?} head schema",
                        r.relation_type
                    ))
                })?;
            let (Some(&hs), Some(&ts)) =
                (span_of.get(r.head.as_str()), span_of.get(r.tail.as_str()))
            else {
                return Err(ModelError::Train(format!(
                    "relation {} endpoints unresolved",
                    r.relation_type
                )));
            };
            if hs == ts {
                continue;
            }
            pair_targets
                .entry((hs, ts))
                .or_insert_with(|| vec![0.0; schema.relation_class_count()])[class] = 1.0;
        }

        let gold_spans: Vec<Span> = entity_spans.iter().map(|(s, _)| *s).collect();
        let gold_pairs: Vec<(Span, Span)> = pair_targets.keys().copied().collect();
        let negatives = sample_negatives(
            n,
            config.max_span_width,
            &gold_spans,
            &gold_pairs,
            config.neg_entity_count,
            config.neg_relation_count,
            derive_seed(seed, 0, 0, hi),
        );

        let none = schema.none_index();
        for s in negatives.entity_spans {
            entity_spans.push((s, none));
        }
        let mut relation_pairs: Vec<((Span, Span), Vec<f64>)> = pair_targets.into_iter().collect();
        for p in negatives.relation_pairs {
            relation_pairs.push((p, vec![0.0; schema.relation_class_count()]));
        }

        let mut soft_relations = Vec::new();
        for sl in example.soft_labels.iter().filter(|sl| sl.head == head) {
            let rel = anns.relations.get(sl.relation_index).ok_or_else(|| {
                ModelError::Train(format!(
                    "soft label references relation {} of {head:?} head",
                    sl.relation_index
                ))
            })?;
            if sl.label.probs.len() != schema.relation_class_count() {
                return Err(ModelError::Dimension {
                    context: format!("{head:?} soft label"),
                    expected: schema.relation_class_count(),
                    got: sl.label.probs.len(),
                });
            }
            let (hs, ts) = (span_of[rel.head.as_str()], span_of[rel.tail.as_str()]);
            if hs == ts {
                continue;
            }
            soft_relations.push((hs, ts, sl.label.clone()));
        }

        let mut soft_entities = Vec::new();
        if config.soft_on_entities {
            for sl in example
                .entity_soft_labels
                .iter()
                .filter(|sl| sl.head == head)
            {
                let ent = anns.entities.get(sl.entity_index).ok_or_else(|| {
                    ModelError::Train(format!(
                        "entity soft label references entity {} of {head:?} head",
                        sl.entity_index
                    ))
                })?;
                if sl.label.probs.len() != schema.entity_class_count() {
                    return Err(ModelError::Dimension {
                        context: format!("{head:?} entity soft label"),
                        expected: schema.entity_class_count(),
                        got: sl.label.probs.len(),
                    });
                }
                soft_entities.push((ent.span, sl.label.clone()));
            }
        }

        heads.insert(
            head,
            HeadCandidates {
                entity_spans,
                relation_pairs,
                soft_relations,
                soft_entities,
            },
        );
    }

    Ok(PreparedExample {
        tokens: example
            .token_texts()
            .iter()
            .map(|s| s.to_string())
            .collect(),
        heads,
    })
}

/// Prepare a batch with per-example derived sampling seeds.
pub fn prepare_batch(
    examples: &[TrainingExample],
    config: &ModelConfig,
    base_seed: u64,
    epoch: usize,
) -> Result<Vec<PreparedExample>, ModelError> {
    examples
        .iter()
        .enumerate()
        .map(|(i, ex)| prepare_example(ex, config, derive_seed(base_seed, epoch, i, 0)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use sciie_core::builder::{build_training_set, SplitSpec, Strategy};
    use sciie_core::fixtures;

    fn small_config() -> ModelConfig {
        let mut cfg = ModelConfig::desk_scale(
            HeadSchema {
                entity_types: vec!["Method".into(), "Material".into(), "Task".into()],
                relation_types: vec!["Used-for".into(), "Compare".into(), "Feature-of".into()],
            },
            HeadSchema {
                entity_types: vec!["ENTITY".into()],
                relation_types: vec!["Usage".into(), "Comparison".into(), "Model".into()],
            },
        );
        cfg.encoder_dim = 8;
        cfg.width_dim = 4;
        cfg.max_span_width = 4;
        cfg
    }

    #[test]
    fn dims_follow_the_construction() {
        let cfg = small_config();
        assert_eq!(cfg.span_rep_dim(), 20);
        assert_eq!(cfg.relation_rep_dim(), 48);
    }

    #[test]
    fn prepared_candidates_cover_gold_and_negatives() {
        let aligned = fixtures::overfit_aligned();
        let spec = SplitSpec {
            label_space: sciie_core::builder::LabelSpace::full(),
            ..SplitSpec::new(Strategy::Mtl)
        };
        let examples = build_training_set(&aligned, None, &spec).unwrap();
        let mut cfg = ModelConfig::desk_scale(
            HeadSchema {
                entity_types: sciie_core::labels::SCIERC_ENTITY_TYPES
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
                relation_types: sciie_core::labels::SCIERC_RELATION_TYPES
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
            },
            HeadSchema {
                entity_types: vec!["ENTITY".into()],
                relation_types: sciie_core::labels::SEMEVAL_RELATION_TYPES
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
            },
        );
        cfg.max_span_width = 5;
        let prep = prepare_example(&examples[0], &cfg, 7).unwrap();
        let sci = &prep.heads[&HeadId::Sci];
        // 3 gold entities; sentence has 8 tokens so plenty of negatives.
        assert!(sci.entity_spans.len() > 3);
        let gold_none: usize = sci
            .entity_spans
            .iter()
            .filter(|(_, c)| *c == cfg.sci_schema.none_index())
            .count();
        assert_eq!(sci.entity_spans.len() - 3, gold_none);
        // Deterministic under the same seed.
        let again = prepare_example(&examples[0], &cfg, 7).unwrap();
        assert_eq!(prep, again);
    }
}
