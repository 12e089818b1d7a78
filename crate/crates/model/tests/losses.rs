//! Loss-term properties: additivity across heads, permutation invariance,
//! head isolation, and agreement with the pure divergence functions.

use sciie_core::builder::{build_training_set, HeadId, LabelSpace, SplitSpec, Strategy};
use sciie_core::fixtures;
use sciie_core::labels::{SCIERC_ENTITY_TYPES, SCIERC_RELATION_TYPES, SEMEVAL_RELATION_TYPES};
use sciie_core::softlabel::{entropy, Divergence};

use sciie_model::autodiff::Graph;
use sciie_model::{prepare_batch, HeadSchema, JointModel, ModelConfig, PreparedExample, Vocab};

fn full_schemas() -> (HeadSchema, HeadSchema) {
    (
        HeadSchema {
            entity_types: SCIERC_ENTITY_TYPES.iter().map(|s| s.to_string()).collect(),
            relation_types: SCIERC_RELATION_TYPES
                .iter()
                .map(|s| s.to_string())
                .collect(),
        },
        HeadSchema {
            entity_types: vec!["ENTITY".to_string()],
            relation_types: SEMEVAL_RELATION_TYPES
                .iter()
                .map(|s| s.to_string())
                .collect(),
        },
    )
}

fn config(divergence: Option<Divergence>) -> ModelConfig {
    let (sci, sem) = full_schemas();
    let mut cfg = ModelConfig::desk_scale(sci, sem);
    cfg.encoder_dim = 12;
    cfg.width_dim = 6;
    cfg.max_span_width = 6;
    cfg.divergence = divergence;
    cfg
}

fn mtl_batch(soft: bool) -> Vec<sciie_core::builder::TrainingExample> {
    let aligned = fixtures::overfit_aligned();
    let spec = SplitSpec {
        label_space: LabelSpace::full(),
        ..SplitSpec::new(if soft {
            Strategy::MtlSoft
        } else {
            Strategy::Mtl
        })
    };
    build_training_set(&aligned, None, &spec).unwrap()
}

fn model_for(batch: &[sciie_core::builder::TrainingExample], cfg: ModelConfig) -> JointModel {
    let token_lists: Vec<Vec<&str>> = batch.iter().map(|e| e.token_texts()).collect();
    let vocab = Vocab::build(token_lists.iter().map(|t| t.as_slice()));
    JointModel::with_tiny_encoder(cfg, vocab, 3)
}

#[test]
fn loss_multi_is_the_sum_of_per_head_losses() {
    let examples = mtl_batch(false);
    let cfg = config(None);
    let model = model_for(&examples, cfg.clone());
    let prepared = prepare_batch(&examples, &cfg, 5, 0).unwrap();

    let values = model.batch_losses(&prepared);
    let sci_alone = model.loss_single(HeadId::Sci, &prepared);
    let sem_alone = model.loss_single(HeadId::Sem, &prepared);
    assert!((values.multi - (sci_alone + sem_alone)).abs() < 1e-9);
    assert!((values.per_head[&HeadId::Sci] - sci_alone).abs() < 1e-9);
    assert!((values.per_head[&HeadId::Sem] - sem_alone).abs() < 1e-9);
    assert!(values.multi >= 0.0 && values.soft == 0.0);
}

#[test]
fn single_head_batch_collapses_to_single_loss() {
    let examples = mtl_batch(false);
    let cfg = config(None);
    let model = model_for(&examples, cfg.clone());
    let mut prepared = prepare_batch(&examples, &cfg, 5, 0).unwrap();
    for ex in &mut prepared {
        ex.heads.remove(&HeadId::Sem);
    }
    let values = model.batch_losses(&prepared);
    assert!((values.multi - values.per_head[&HeadId::Sci]).abs() < 1e-12);
    assert_eq!(values.per_head[&HeadId::Sem], 0.0);
}

#[test]
fn candidate_order_does_not_change_losses() {
    let examples = mtl_batch(true);
    let mut cfg = config(Some(Divergence::KlStandard));
    cfg.neg_entity_count = 20;
    let model = model_for(&examples, cfg.clone());
    let prepared = prepare_batch(&examples, &cfg, 5, 0).unwrap();

    let mut shuffled: Vec<PreparedExample> = prepared.clone();
    for ex in &mut shuffled {
        for cands in ex.heads.values_mut() {
            cands.entity_spans.reverse();
            cands.relation_pairs.reverse();
            cands.soft_relations.reverse();
        }
    }
    let a = model.batch_losses(&prepared);
    let b = model.batch_losses(&shuffled);
    assert!((a.multi - b.multi).abs() < 1e-9);
    assert!((a.soft - b.soft).abs() < 1e-9);
    assert!((a.total - b.total).abs() < 1e-9);
}

#[test]
fn loss_single_matches_a_hand_summed_oracle() {
    // Term-by-term oracle: rebuild every candidate's logits through the
    // representation helpers, then hand-sum cross-entropy (logsumexp form)
    // and per-class binary cross-entropy with plain ln/exp.
    let examples = mtl_batch(false);
    let mut cfg = config(None);
    cfg.neg_entity_count = 3;
    cfg.neg_relation_count = 3;
    let model = model_for(&examples, cfg.clone());
    let prepared = prepare_batch(&examples[..2], &cfg, 5, 0).unwrap();

    for head in [HeadId::Sci, HeadId::Sem] {
        let mut ce_terms = Vec::new();
        let mut bce_terms = Vec::new();
        for ex in &prepared {
            let Some(cands) = ex.heads.get(&head) else {
                continue;
            };
            let tokens: Vec<&str> = ex.tokens.iter().map(|s| s.as_str()).collect();
            let mut g = Graph::new(&model.params);
            let mut state = model.encode_sentence(&mut g, &tokens);
            for &(span, class) in &cands.entity_spans {
                let rep = model.span_rep(&mut g, &mut state, span);
                let logits_var = model.entity_logits(&mut g, head, rep);
                let z = g.value(logits_var).to_vec();
                let lse = z.iter().map(|v| v.exp()).sum::<f64>().ln();
                ce_terms.push(lse - z[class]);
            }
            for ((hs, ts), targets) in &cands.relation_pairs {
                let rep = model.relation_rep(&mut g, &mut state, *hs, *ts);
                let logits_var = model.relation_logits(&mut g, head, rep);
                let z = g.value(logits_var).to_vec();
                let mut sum = 0.0;
                for (zi, t) in z.iter().zip(targets) {
                    let q = 1.0 / (1.0 + (-zi).exp());
                    sum -= t * q.ln() + (1.0 - t) * (1.0 - q).ln();
                }
                bce_terms.push(sum / z.len() as f64);
            }
        }
        let oracle = ce_terms.iter().sum::<f64>() / ce_terms.len() as f64
            + bce_terms.iter().sum::<f64>() / bce_terms.len() as f64;
        let got = model.loss_single(head, &prepared);
        assert!(
            (got - oracle).abs() < 1e-9,
            "{head:?}: loss_single {got} vs hand-summed {oracle}"
        );
    }
}

#[test]
fn symmetric_batch_with_tied_heads_doubles_the_loss() {
    // Identical schemas, identical annotations on both heads, and head-2
    // classifier parameters copied from head 1: loss_multi must be exactly
    // twice the single-head loss.
    let (sci_schema, _) = full_schemas();
    let mut cfg = ModelConfig::desk_scale(sci_schema.clone(), sci_schema);
    cfg.encoder_dim = 10;
    cfg.width_dim = 5;
    cfg.max_span_width = 5;
    cfg.neg_entity_count = 10;
    cfg.neg_relation_count = 10;

    let mut examples = mtl_batch(false);
    for ex in &mut examples {
        ex.sem = None; // head 2 gets mirrored candidates below
    }
    let mut model = model_for(&examples, cfg.clone());
    for name in ["w_ent", "b_ent", "w_rel", "b_rel", "w_aux", "b_aux"] {
        let src = model.params.find(&format!("sci.{name}")).unwrap().clone();
        let dst = model.params.find(&format!("sem.{name}")).unwrap().clone();
        let values: Vec<f64> =
            model.params.values[src.offset..src.offset + src.rows * src.cols].to_vec();
        model.params.values[dst.offset..dst.offset + dst.rows * dst.cols].copy_from_slice(&values);
    }

    let mut prepared = prepare_batch(&examples, &cfg, 5, 0).unwrap();
    for ex in &mut prepared {
        // Mirror head-1 candidates onto head 2.
        let sci = ex.heads[&HeadId::Sci].clone();
        ex.heads.insert(HeadId::Sem, sci);
    }
    let values = model.batch_losses(&prepared);
    let single = model.loss_single(HeadId::Sci, &prepared);
    assert!(
        (values.multi - 2.0 * single).abs() < 1e-9,
        "multi {} vs 2x single {}",
        values.multi,
        2.0 * single
    );
}

#[test]
fn zeroed_head_receives_no_gradient() {
    let examples = mtl_batch(false);
    let cfg = config(None);
    let model = model_for(&examples, cfg.clone());
    let mut prepared = prepare_batch(&examples, &cfg, 5, 0).unwrap();
    for ex in &mut prepared {
        ex.heads.remove(&HeadId::Sem);
    }
    let mut grads = vec![0.0; model.params.len()];
    model.batch_backward(&prepared, &mut grads);

    for name in [
        "sem.w_ent",
        "sem.b_ent",
        "sem.w_rel",
        "sem.b_rel",
        "sem.w_aux",
        "sem.b_aux",
    ] {
        let spec = model.params.find(name).unwrap();
        let slice = &grads[spec.offset..spec.offset + spec.rows * spec.cols];
        assert!(
            slice.iter().all(|&g| g == 0.0),
            "{name} should receive zero gradient"
        );
    }
    // The shared encoder still learns from head 1.
    let enc = model.params.find("enc.embedding").unwrap();
    let slice = &grads[enc.offset..enc.offset + enc.rows * enc.cols];
    assert!(slice.iter().any(|&g| g != 0.0));
}

#[test]
fn soft_loss_matches_the_divergence_oracle() {
    let examples = mtl_batch(true);
    let mut cfg = config(Some(Divergence::KlStandard));
    // No sampling noise: negatives off so the aux input is easy to rebuild.
    cfg.neg_entity_count = 0;
    cfg.neg_relation_count = 0;
    let model = model_for(&examples, cfg.clone());

    // One example, one soft-labeled relation per head kept.
    let mut prepared = prepare_batch(&examples[..1], &cfg, 5, 0).unwrap();
    for ex in &mut prepared {
        for cands in ex.heads.values_mut() {
            cands.soft_relations.truncate(1);
        }
    }
    let values = model.batch_losses(&prepared);

    // Rebuild each aux projection by hand and evaluate the divergence.
    let mut expected = 0.0;
    for (head, cands) in &prepared[0].heads {
        let (hs, ts, label) = &cands.soft_relations[0];
        let mut g = Graph::new(&model.params);
        let tokens: Vec<&str> = prepared[0].tokens.iter().map(|s| s.as_str()).collect();
        let mut state = model.encode_sentence(&mut g, &tokens);
        let rep = model.relation_rep(&mut g, &mut state, *hs, *ts);
        let logits = model.aux_relation_logits(&mut g, *head, rep);
        expected += Divergence::KlStandard
            .value_from_logits(label, g.value(logits))
            .unwrap();
    }
    assert!((values.soft - expected).abs() < 1e-10);
}

#[test]
fn ce_minus_kl_equals_mean_entropy() {
    let examples = mtl_batch(true);
    let mut cfg_kl = config(Some(Divergence::KlStandard));
    cfg_kl.neg_entity_count = 5;
    let mut cfg_ce = cfg_kl.clone();
    cfg_ce.divergence = Some(Divergence::CrossEntropy);

    let model_kl = model_for(&examples, cfg_kl.clone());
    let mut model_ce = model_for(&examples, cfg_ce.clone());
    // Same parameters so Q matches between the two runs.
    model_ce
        .params
        .values
        .copy_from_slice(&model_kl.params.values);

    let prepared = prepare_batch(&examples, &cfg_kl, 5, 0).unwrap();
    let kl = model_kl.batch_losses(&prepared);
    let ce = model_ce.batch_losses(&prepared);

    // Per head, CE - KL is the mean soft-label entropy.
    let mut expected = 0.0;
    for cands in prepared.iter().flat_map(|e| e.heads.values()) {
        let _ = cands;
    }
    for head in [HeadId::Sci, HeadId::Sem] {
        let entropies: Vec<f64> = prepared
            .iter()
            .filter_map(|e| e.heads.get(&head))
            .flat_map(|c| c.soft_relations.iter().map(|(_, _, l)| entropy(&l.probs)))
            .collect();
        if !entropies.is_empty() {
            expected += entropies.iter().sum::<f64>() / entropies.len() as f64;
        }
    }
    assert!(
        ((ce.soft - kl.soft) - expected).abs() < 1e-9,
        "CE - KL = {} vs mean entropy {expected}",
        ce.soft - kl.soft
    );
}
