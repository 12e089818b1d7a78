//! Loss assembly.
//!
//! Every term is a mean over its candidate pool for the whole batch, so
//! shuffling candidates leaves the value unchanged and per-head losses add
//! up exactly:
//!
//! - per head: span cross-entropy + per-candidate relation BCE
//! - multi-perspective loss: sum over the two heads
//! - soft loss: mean divergence over soft-labeled relations per head,
//!   summed over heads; the total adds it to the multi-perspective loss.

use std::collections::BTreeMap;

use sciie_core::builder::HeadId;

use crate::autodiff::{Graph, Var};
use crate::spert::{JointModel, PreparedExample};

pub struct LossVars {
    pub per_head: BTreeMap<HeadId, Var>,
    pub multi: Var,
    pub soft: Var,
    pub total: Var,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossValues {
    pub per_head: BTreeMap<HeadId, f64>,
    pub multi: f64,
    pub soft: f64,
    pub total: f64,
}

impl JointModel {
    /// Build the full loss graph over a prepared batch. Heads absent from
    /// every example contribute zero.
    pub fn loss_graph(&self, batch: &[PreparedExample]) -> (Graph<'_>, LossVars) {
        let mut g = Graph::new(&self.params);

        let mut ent_terms: BTreeMap<HeadId, Vec<Var>> = BTreeMap::new();
        let mut rel_terms: BTreeMap<HeadId, Vec<Var>> = BTreeMap::new();
        let mut soft_terms: BTreeMap<HeadId, Vec<Var>> = BTreeMap::new();

        for example in batch {
            if example.tokens.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = example.tokens.iter().map(|s| s.as_str()).collect();
            let mut state = self.encode_sentence(&mut g, &tokens);

            for (&head, cands) in &example.heads {
                for &(span, class) in &cands.entity_spans {
                    let rep = self.span_rep(&mut g, &mut state, span);
                    let logits = self.entity_logits(&mut g, head, rep);
                    let ce = g.ce_with_logits(logits, class);
                    ent_terms.entry(head).or_default().push(ce);
                }
                for ((hs, ts), targets) in &cands.relation_pairs {
                    let rep = self.relation_rep(&mut g, &mut state, *hs, *ts);
                    let logits = self.relation_logits(&mut g, head, rep);
                    let bce = g.bce_with_logits(logits, targets.clone());
                    rel_terms.entry(head).or_default().push(bce);
                }
                if let Some(div) = self.config.divergence {
                    for (hs, ts, label) in &cands.soft_relations {
                        let rep = self.relation_rep(&mut g, &mut state, *hs, *ts);
                        let logits = self.aux_relation_logits(&mut g, head, rep);
                        let term = g.soft_divergence(logits, label.clone(), div);
                        soft_terms.entry(head).or_default().push(term);
                    }
                    if self.config.soft_on_entities {
                        for (span, label) in &cands.soft_entities {
                            let rep = self.span_rep(&mut g, &mut state, *span);
                            if let Some(logits) = self.aux_entity_logits(&mut g, head, rep) {
                                let term = g.soft_divergence(logits, label.clone(), div);
                                soft_terms.entry(head).or_default().push(term);
                            }
                        }
                    }
                }
            }
        }

        let mean_or_zero = |g: &mut Graph<'_>, terms: Option<&Vec<Var>>| -> Var {
            match terms {
                Some(t) if !t.is_empty() => g.mean_scalars(t),
                _ => g.zeros(1),
            }
        };

        let mut per_head = BTreeMap::new();
        for head in [HeadId::Sci, HeadId::Sem] {
            let span_term = mean_or_zero(&mut g, ent_terms.get(&head));
            let rel_term = mean_or_zero(&mut g, rel_terms.get(&head));
            per_head.insert(head, g.add(span_term, rel_term));
        }
        let multi = g.add(per_head[&HeadId::Sci], per_head[&HeadId::Sem]);

        let soft_sci = mean_or_zero(&mut g, soft_terms.get(&HeadId::Sci));
        let soft_sem = mean_or_zero(&mut g, soft_terms.get(&HeadId::Sem));
        let soft = g.add(soft_sci, soft_sem);

        let total = g.add(multi, soft);
        (
            g,
            LossVars {
                per_head,
                multi,
                soft,
                total,
            },
        )
    }

    /// Loss values without gradients.
    pub fn batch_losses(&self, batch: &[PreparedExample]) -> LossValues {
        let (g, vars) = self.loss_graph(batch);
        self.extract(&g, &vars)
    }

    /// Forward + backward on the total loss; gradients accumulate into
    /// `grads` (flat, aligned with the parameter set).
    pub fn batch_backward(&self, batch: &[PreparedExample], grads: &mut [f64]) -> LossValues {
        let (g, vars) = self.loss_graph(batch);
        g.backward(vars.total, grads);
        self.extract(&g, &vars)
    }

    fn extract(&self, g: &Graph<'_>, vars: &LossVars) -> LossValues {
        LossValues {
            per_head: vars
                .per_head
                .iter()
                .map(|(h, v)| (*h, g.scalar(*v)))
                .collect(),
            multi: g.scalar(vars.multi),
            soft: g.scalar(vars.soft),
            total: g.scalar(vars.total),
        }
    }

    /// Loss of a single head computed in isolation (for the additivity
    /// property and per-head diagnostics).
    pub fn loss_single(&self, head: HeadId, batch: &[PreparedExample]) -> f64 {
        let filtered: Vec<PreparedExample> = batch
            .iter()
            .map(|ex| PreparedExample {
                tokens: ex.tokens.clone(),
                heads: ex
                    .heads
                    .iter()
                    .filter(|(h, _)| **h == head)
                    .map(|(h, c)| (*h, c.clone()))
                    .collect(),
            })
            .collect();
        let values = self.batch_losses(&filtered);
        values.per_head[&head]
    }
}
