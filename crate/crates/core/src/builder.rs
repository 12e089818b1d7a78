//! Materializes training-set variants from aligned corpora.
//!
//! Single-head strategies (independent, concat, mixed) canonicalize their
//! annotations into the SciERC head slot, mapping SemEval relation labels
//! into SciERC naming, so a one-head model sees one label space. Multi-task
//! strategies populate both head slots with each perspective's own naming.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::align::AlignedDocument;
use crate::corpus::{Document, EntityMention, Perspective, RelationMention, Span, Token};
use crate::error::CoreError;
use crate::io::{
    EntityRec, EntitySoftLabelRec, RelationRec, SentenceRec, SoftLabelRec, TokenRec, UnifiedRecord,
};
use crate::labels::{
    map_relation_label, MappingDirection, COMMON_RELATION_ORDER_SCI, COMMON_RELATION_ORDER_SEM,
    ENTITY_UNTYPED, SCIERC_ENTITY_TYPES, SCIERC_RELATION_TYPES, SEMEVAL_RELATION_TYPES,
};
use crate::softlabel::{make_soft_label, Agreement, SoftLabel};

/// The two model heads. Head 1 carries SciERC-style annotations, head 2
/// SemEval-style.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeadId {
    Sci,
    Sem,
}

impl HeadId {
    pub fn perspective(self) -> Perspective {
        match self {
            HeadId::Sci => Perspective::Sci,
            HeadId::Sem => Perspective::Sem,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HeadAnnotations {
    pub entities: Vec<EntityMention>,
    pub relations: Vec<RelationMention>,
}

/// Soft label attached to one relation of one head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftLabeledRelation {
    pub head: HeadId,
    /// Index into that head's relation list.
    pub relation_index: usize,
    pub label: SoftLabel,
}

/// Soft label attached to one entity of one head; emitted only when the
/// entity-head extension is switched on. The distribution runs over the
/// head's entity classes plus NONE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftLabeledEntity {
    pub head: HeadId,
    /// Index into that head's entity list.
    pub entity_index: usize,
    pub label: SoftLabel,
}

/// One sentence with per-head annotations and optional soft labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingExample {
    pub doc_id: String,
    pub sentence_index: usize,
    pub tokens: Vec<Token>,
    pub sci: Option<HeadAnnotations>,
    pub sem: Option<HeadAnnotations>,
    pub soft_labels: Vec<SoftLabeledRelation>,
    #[serde(default)]
    pub entity_soft_labels: Vec<SoftLabeledEntity>,
}

impl TrainingExample {
    pub fn head(&self, id: HeadId) -> Option<&HeadAnnotations> {
        match id {
            HeadId::Sci => self.sci.as_ref(),
            HeadId::Sem => self.sem.as_ref(),
        }
    }

    pub fn token_texts(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    IndependentSem,
    IndependentSci,
    Concat,
    ConcatPlusSci,
    ConcatPlusSem,
    Mixed,
    MixedSci,
    MixedSem,
    Mtl,
    MtlSoft,
    SciercStandard,
}

/// How conflicting (low-agreement) relation pairs are resolved in mixed sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConflictPolicy {
    /// Keep both conflicting relations.
    #[default]
    KeepBoth,
    /// Drop the SemEval side of each conflict.
    PreferSci,
    /// Drop the SciERC side.
    PreferSem,
}

/// Label space the built set lives in.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelSpace {
    /// Entity types erased to ENTITY, relations restricted to the five
    /// common types.
    #[default]
    Common5,
    /// Full native label sets; SemEval entities carry `sem_entity_label`.
    Full { sem_entity_label: String },
}

impl LabelSpace {
    pub fn full() -> Self {
        LabelSpace::Full {
            sem_entity_label: ENTITY_UNTYPED.to_string(),
        }
    }

    pub fn relation_classes(&self, head: HeadId) -> Vec<String> {
        match (self, head) {
            (LabelSpace::Common5, HeadId::Sci) => COMMON_RELATION_ORDER_SCI
                .iter()
                .map(|s| s.to_string())
                .collect(),
            (LabelSpace::Common5, HeadId::Sem) => COMMON_RELATION_ORDER_SEM
                .iter()
                .map(|s| s.to_string())
                .collect(),
            (LabelSpace::Full { .. }, HeadId::Sci) => SCIERC_RELATION_TYPES
                .iter()
                .map(|s| s.to_string())
                .collect(),
            (LabelSpace::Full { .. }, HeadId::Sem) => SEMEVAL_RELATION_TYPES
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }

    pub fn entity_classes(&self, head: HeadId) -> Vec<String> {
        match (self, head) {
            (LabelSpace::Common5, _) => vec![ENTITY_UNTYPED.to_string()],
            (LabelSpace::Full { .. }, HeadId::Sci) => {
                SCIERC_ENTITY_TYPES.iter().map(|s| s.to_string()).collect()
            }
            (LabelSpace::Full { sem_entity_label }, HeadId::Sem) => vec![sem_entity_label.clone()],
        }
    }

    fn keeps_relation(&self, label: &str, head: HeadId) -> bool {
        match self {
            LabelSpace::Common5 => match head {
                HeadId::Sci => COMMON_RELATION_ORDER_SCI.contains(&label),
                HeadId::Sem => COMMON_RELATION_ORDER_SEM.contains(&label),
            },
            LabelSpace::Full { .. } => true,
        }
    }

    fn entity_label(&self, native: &str, head: HeadId) -> String {
        match (self, head) {
            (LabelSpace::Common5, _) => ENTITY_UNTYPED.to_string(),
            (LabelSpace::Full { .. }, HeadId::Sci) => native.to_string(),
            (LabelSpace::Full { sem_entity_label }, HeadId::Sem) => sem_entity_label.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub strategy: Strategy,
    #[serde(default)]
    pub conflict_policy: ConflictPolicy,
    #[serde(default)]
    pub label_space: LabelSpace,
    /// Deterministic subsample: (size, seed).
    #[serde(default)]
    pub cap: Option<(usize, u64)>,
    /// Extend the soft-label scheme to entity heads: exactly matched
    /// mentions grade high, boundary conflicts low, unmatched medium.
    #[serde(default)]
    pub entity_soft_labels: bool,
}

impl SplitSpec {
    pub fn new(strategy: Strategy) -> Self {
        SplitSpec {
            strategy,
            conflict_policy: match strategy {
                Strategy::MixedSci => ConflictPolicy::PreferSci,
                Strategy::MixedSem => ConflictPolicy::PreferSem,
                _ => ConflictPolicy::KeepBoth,
            },
            label_space: LabelSpace::Common5,
            cap: None,
            entity_soft_labels: false,
        }
    }

    /// Test set that must not be evaluated because its non-overlap
    /// exclusions were consumed for training.
    pub fn forbidden_eval(&self) -> Option<Perspective> {
        match self.strategy {
            Strategy::ConcatPlusSci => Some(Perspective::Sci),
            Strategy::ConcatPlusSem => Some(Perspective::Sem),
            _ => None,
        }
    }
}

/// Official train/dev/test document-id partition of a SciERC-style corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SciercPartition {
    pub train: Vec<String>,
    pub dev: Vec<String>,
    pub test: Vec<String>,
}

fn retag(
    entities: &[EntityMention],
    relations: &[RelationMention],
    to: Perspective,
) -> HeadAnnotations {
    HeadAnnotations {
        entities: entities
            .iter()
            .map(|e| EntityMention {
                perspective: to,
                ..e.clone()
            })
            .collect(),
        relations: relations
            .iter()
            .map(|r| RelationMention {
                perspective: to,
                ..r.clone()
            })
            .collect(),
    }
}

/// Annotations of one perspective's sentence after label-space application.
pub fn annotations_in_space(
    doc: &Document,
    si: usize,
    head: HeadId,
    space: &LabelSpace,
) -> HeadAnnotations {
    space_annotations(doc, si, head, space)
}

fn space_annotations(
    doc: &Document,
    si: usize,
    head: HeadId,
    space: &LabelSpace,
) -> HeadAnnotations {
    let sent = &doc.sentences[si];
    let entities: Vec<EntityMention> = sent
        .entities
        .iter()
        .map(|e| EntityMention {
            entity_type: space.entity_label(&e.entity_type, head),
            ..e.clone()
        })
        .collect();
    let relations: Vec<RelationMention> = sent
        .relations
        .iter()
        .filter(|r| space.keeps_relation(&r.relation_type, head))
        .cloned()
        .collect();
    HeadAnnotations {
        entities,
        relations,
    }
}

/// Map sem-naming relation labels into sci naming; labels without a mapping
/// stay verbatim (they only occur in the full label space).
pub fn map_into_sci_naming(anns: HeadAnnotations) -> HeadAnnotations {
    into_sci_naming(anns)
}

fn into_sci_naming(mut anns: HeadAnnotations) -> HeadAnnotations {
    for r in &mut anns.relations {
        if let Some(mapped) = map_relation_label(&r.relation_type, MappingDirection::SemToSci) {
            r.relation_type = mapped.to_string();
        }
    }
    anns
}

fn single_head_example(
    doc_id: &str,
    si: usize,
    tokens: &[Token],
    anns: HeadAnnotations,
) -> TrainingExample {
    TrainingExample {
        doc_id: doc_id.to_string(),
        sentence_index: si,
        tokens: tokens.to_vec(),
        sci: Some(retag(&anns.entities, &anns.relations, Perspective::Sci)),
        sem: None,
        soft_labels: Vec::new(),
        entity_soft_labels: Vec::new(),
    }
}

/// Emit every sentence of a plain document as a canonical single-head
/// example.
fn document_examples(doc: &Document, head: HeadId, space: &LabelSpace) -> Vec<TrainingExample> {
    (0..doc.sentences.len())
        .map(|si| {
            let anns = space_annotations(doc, si, head, space);
            let anns = match head {
                HeadId::Sci => anns,
                HeadId::Sem => into_sci_naming(anns),
            };
            single_head_example(&doc.doc_id, si, &doc.sentences[si].tokens, anns)
        })
        .collect()
}

fn mixed_sentence(
    pair: &AlignedDocument,
    si: usize,
    policy: ConflictPolicy,
    space: &LabelSpace,
) -> TrainingExample {
    let sci_anns = space_annotations(&pair.sci_doc, si, HeadId::Sci, space);
    let sem_anns = space_annotations(&pair.sem_doc, si, HeadId::Sem, space);

    // Entity union, deduplicated by span. The SciERC mention wins a span tie
    // so relation endpoints from both sides remap onto one id.
    let mut entities: Vec<EntityMention> = sci_anns.entities.clone();
    let mut span_to_id: BTreeMap<Span, String> =
        entities.iter().map(|e| (e.span, e.id.clone())).collect();
    for e in &sem_anns.entities {
        if let std::collections::btree_map::Entry::Vacant(slot) = span_to_id.entry(e.span) {
            slot.insert(e.id.clone());
            entities.push(e.clone());
        }
    }

    let sem_sent = &pair.sem_doc.sentences[si];
    let remap_sem = |id: &str| -> Option<String> {
        let span = sem_sent.entity(id)?.span;
        span_to_id.get(&span).cloned()
    };

    let survives_sci = |r: &RelationMention| space.keeps_relation(&r.relation_type, HeadId::Sci);
    let survives_sem = |r: &RelationMention| space.keeps_relation(&r.relation_type, HeadId::Sem);

    let mut relations: Vec<RelationMention> = Vec::new();
    let push_unique = |rel: RelationMention, relations: &mut Vec<RelationMention>| {
        let dup = relations.iter().any(|r| {
            r.head == rel.head && r.tail == rel.tail && r.relation_type == rel.relation_type
        });
        if !dup {
            relations.push(rel);
        }
    };
    let sem_into_union = |r: &RelationMention| -> Option<RelationMention> {
        let head = remap_sem(&r.head)?;
        let tail = remap_sem(&r.tail)?;
        let label = map_relation_label(&r.relation_type, MappingDirection::SemToSci)
            .map(str::to_string)
            .unwrap_or_else(|| r.relation_type.clone());
        Some(RelationMention {
            head,
            tail,
            relation_type: label,
            perspective: Perspective::Sci,
        })
    };

    for v in pair.relation_verdicts.iter().filter(|v| v.sentence == si) {
        match (v.agreement, &v.sci_relation, &v.sem_relation) {
            // Consistent pair: the one retained relation.
            (Agreement::High, Some(sci), Some(_)) if survives_sci(sci) => {
                push_unique(sci.clone(), &mut relations);
            }
            (Agreement::High, Some(_), Some(sem)) if survives_sem(sem) => {
                if let Some(rel) = sem_into_union(sem) {
                    push_unique(rel, &mut relations);
                }
            }
            (Agreement::Low, Some(sci), Some(sem)) => {
                let keep_sci = survives_sci(sci)
                    && matches!(policy, ConflictPolicy::KeepBoth | ConflictPolicy::PreferSci);
                let keep_sem = survives_sem(sem)
                    && matches!(policy, ConflictPolicy::KeepBoth | ConflictPolicy::PreferSem);
                if keep_sci {
                    push_unique(sci.clone(), &mut relations);
                }
                if keep_sem {
                    if let Some(rel) = sem_into_union(sem) {
                        push_unique(rel, &mut relations);
                    }
                }
                // If the filter removed the kept side, fall back to the
                // surviving one so the annotation is not lost.
                if !keep_sci && !keep_sem {
                    if survives_sci(sci) {
                        push_unique(sci.clone(), &mut relations);
                    } else if survives_sem(sem) {
                        if let Some(rel) = sem_into_union(sem) {
                            push_unique(rel, &mut relations);
                        }
                    }
                }
            }
            (Agreement::Medium, Some(sci), None) if survives_sci(sci) => {
                push_unique(sci.clone(), &mut relations);
            }
            (Agreement::Medium, None, Some(sem)) if survives_sem(sem) => {
                if let Some(rel) = sem_into_union(sem) {
                    push_unique(rel, &mut relations);
                }
            }
            _ => {}
        }
    }

    let anns = retag(&entities, &relations, Perspective::Sci);
    single_head_example(
        &pair.sci_doc.doc_id,
        si,
        &pair.sci_doc.sentences[si].tokens,
        anns,
    )
}

fn verdict_agreement(
    pair: &AlignedDocument,
    si: usize,
    rel: &RelationMention,
) -> Result<Agreement, CoreError> {
    pair.agreement_of(si, rel).ok_or_else(|| {
        CoreError::InvalidInput(format!(
            "no agreement verdict for relation {} in {} sentence {si}; run assign_agreements first",
            rel.relation_type, pair.sci_doc.doc_id
        ))
    })
}

fn mtl_example(
    pair: &AlignedDocument,
    si: usize,
    space: &LabelSpace,
    soft: bool,
    entity_soft: bool,
) -> Result<TrainingExample, CoreError> {
    let sci_anns = space_annotations(&pair.sci_doc, si, HeadId::Sci, space);
    let sem_anns = space_annotations(&pair.sem_doc, si, HeadId::Sem, space);

    let mut soft_labels = Vec::new();
    let mut entity_soft_labels = Vec::new();
    if soft {
        for (head, anns) in [(HeadId::Sci, &sci_anns), (HeadId::Sem, &sem_anns)] {
            let classes = space.relation_classes(head);
            for (ri, rel) in anns.relations.iter().enumerate() {
                let agreement = verdict_agreement(pair, si, rel)?;
                let Some(target) = classes.iter().position(|c| c == &rel.relation_type) else {
                    continue;
                };
                soft_labels.push(SoftLabeledRelation {
                    head,
                    relation_index: ri,
                    label: make_soft_label(target, agreement, classes.len())?,
                });
            }
        }
    }
    if entity_soft {
        for (head, anns) in [(HeadId::Sci, &sci_anns), (HeadId::Sem, &sem_anns)] {
            let classes = space.entity_classes(head);
            // K covers the classifier's classes including NONE.
            let k = classes.len() + 1;
            for (ei, ent) in anns.entities.iter().enumerate() {
                let Some(target) = classes.iter().position(|c| c == &ent.entity_type) else {
                    continue;
                };
                let kind = pair.entity_matches.iter().find_map(|m| {
                    let matches = m.sentence == si
                        && match head {
                            HeadId::Sci => m.sci_id == ent.id,
                            HeadId::Sem => m.sem_id == ent.id,
                        };
                    matches.then_some(m.kind)
                });
                let agreement = match kind {
                    Some(crate::align::MatchKind::Exact) => Agreement::High,
                    Some(crate::align::MatchKind::Partial) => Agreement::Low,
                    None => Agreement::Medium,
                };
                entity_soft_labels.push(SoftLabeledEntity {
                    head,
                    entity_index: ei,
                    label: make_soft_label(target, agreement, k)?,
                });
            }
        }
    }

    Ok(TrainingExample {
        doc_id: pair.sci_doc.doc_id.clone(),
        sentence_index: si,
        tokens: pair.sci_doc.sentences[si].tokens.clone(),
        sci: Some(sci_anns),
        sem: Some(sem_anns),
        soft_labels,
        entity_soft_labels,
    })
}

/// Build the training set for every non-standard-split strategy.
pub fn build_training_set(
    aligned: &[AlignedDocument],
    extras: Option<&[Document]>,
    spec: &SplitSpec,
) -> Result<Vec<TrainingExample>, CoreError> {
    let space = &spec.label_space;
    let mut examples: Vec<TrainingExample> = Vec::new();

    match spec.strategy {
        Strategy::IndependentSci => {
            for pair in aligned {
                examples.extend(document_examples(&pair.sci_doc, HeadId::Sci, space));
            }
        }
        Strategy::IndependentSem => {
            for pair in aligned {
                examples.extend(document_examples(&pair.sem_doc, HeadId::Sem, space));
            }
        }
        Strategy::Concat | Strategy::ConcatPlusSci | Strategy::ConcatPlusSem => {
            for pair in aligned {
                for si in 0..pair.sci_doc.sentences.len() {
                    let sci_anns = space_annotations(&pair.sci_doc, si, HeadId::Sci, space);
                    examples.push(single_head_example(
                        &pair.sci_doc.doc_id,
                        si,
                        &pair.sci_doc.sentences[si].tokens,
                        sci_anns,
                    ));
                    let sem_anns =
                        into_sci_naming(space_annotations(&pair.sem_doc, si, HeadId::Sem, space));
                    examples.push(single_head_example(
                        &pair.sem_doc.doc_id,
                        si,
                        &pair.sem_doc.sentences[si].tokens,
                        sem_anns,
                    ));
                }
            }
            if !matches!(spec.strategy, Strategy::Concat) {
                let extras = extras.ok_or_else(|| {
                    CoreError::InvalidInput(
                        "concat_plus strategies need the non-overlap extras corpus".into(),
                    )
                })?;
                let head = if matches!(spec.strategy, Strategy::ConcatPlusSci) {
                    HeadId::Sci
                } else {
                    HeadId::Sem
                };
                for doc in extras {
                    examples.extend(document_examples(doc, head, space));
                }
            }
        }
        Strategy::Mixed | Strategy::MixedSci | Strategy::MixedSem => {
            let policy = match spec.strategy {
                Strategy::Mixed => spec.conflict_policy,
                Strategy::MixedSci => ConflictPolicy::PreferSci,
                Strategy::MixedSem => ConflictPolicy::PreferSem,
                _ => unreachable!(),
            };
            for pair in aligned {
                for si in 0..pair.sci_doc.sentences.len() {
                    examples.push(mixed_sentence(pair, si, policy, space));
                }
            }
        }
        Strategy::Mtl | Strategy::MtlSoft => {
            let soft = matches!(spec.strategy, Strategy::MtlSoft);
            for pair in aligned {
                for si in 0..pair.sci_doc.sentences.len() {
                    examples.push(mtl_example(pair, si, space, soft, spec.entity_soft_labels)?);
                }
            }
        }
        Strategy::SciercStandard => {
            return Err(CoreError::InvalidInput(
                "use build_scierc_standard_split for the standard-split strategy".into(),
            ));
        }
    }

    if let Some((n, seed)) = spec.cap {
        examples = cap_data_quantity(examples, n, seed)?;
    }
    Ok(examples)
}

/// Standard-split training set: overlapped training abstracts get dual-head
/// annotations with verdict-graded soft labels; non-overlapped training
/// abstracts get single-head SciERC annotations with medium-agreement soft
/// labels. The test documents are returned untouched.
pub fn build_scierc_standard_split(
    sci_corpus: &[Document],
    aligned: &[AlignedDocument],
    partition: &SciercPartition,
) -> Result<(Vec<TrainingExample>, Vec<Document>), CoreError> {
    let space = LabelSpace::full();
    let by_id: BTreeMap<&str, &Document> =
        sci_corpus.iter().map(|d| (d.doc_id.as_str(), d)).collect();
    let aligned_by_id: BTreeMap<&str, &AlignedDocument> = aligned
        .iter()
        .map(|p| (p.sci_doc.doc_id.as_str(), p))
        .collect();

    let mut train = Vec::new();
    for id in partition.train.iter().chain(partition.dev.iter()) {
        if let Some(pair) = aligned_by_id.get(id.as_str()) {
            for si in 0..pair.sci_doc.sentences.len() {
                train.push(mtl_example(pair, si, &space, true, false)?);
            }
        } else if let Some(doc) = by_id.get(id.as_str()) {
            let classes = space.relation_classes(HeadId::Sci);
            for si in 0..doc.sentences.len() {
                let anns = space_annotations(doc, si, HeadId::Sci, &space);
                let mut soft_labels = Vec::new();
                for (ri, rel) in anns.relations.iter().enumerate() {
                    let Some(target) = classes.iter().position(|c| c == &rel.relation_type) else {
                        continue;
                    };
                    soft_labels.push(SoftLabeledRelation {
                        head: HeadId::Sci,
                        relation_index: ri,
                        label: make_soft_label(target, Agreement::Medium, classes.len())?,
                    });
                }
                train.push(TrainingExample {
                    doc_id: doc.doc_id.clone(),
                    sentence_index: si,
                    tokens: doc.sentences[si].tokens.clone(),
                    sci: Some(anns),
                    sem: None,
                    soft_labels,
                    entity_soft_labels: Vec::new(),
                });
            }
        } else {
            return Err(CoreError::InvalidInput(format!(
                "partition references unknown document {id}"
            )));
        }
    }

    let mut test = Vec::new();
    for id in &partition.test {
        let doc = by_id.get(id.as_str()).ok_or_else(|| {
            CoreError::InvalidInput(format!("partition references unknown test document {id}"))
        })?;
        test.push((*doc).clone());
    }

    Ok((train, test))
}

/// Deterministic pseudo-random subsample of size `n`. Larger caps with the
/// same seed contain smaller ones (prefixes of one fixed permutation), so
/// data-quantity curves are nested.
pub fn cap_data_quantity(
    examples: Vec<TrainingExample>,
    n: usize,
    seed: u64,
) -> Result<Vec<TrainingExample>, CoreError> {
    if n > examples.len() {
        return Err(CoreError::CapTooLarge {
            requested: n,
            available: examples.len(),
        });
    }
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..order.len()).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let mut keep: Vec<usize> = order.into_iter().take(n).collect();
    keep.sort_unstable();
    let mut by_index: BTreeMap<usize, TrainingExample> = examples.into_iter().enumerate().collect();
    Ok(keep
        .into_iter()
        .map(|i| by_index.remove(&i).expect("index in range"))
        .collect())
}

/// Serialize a built set as unified records: one sentence per record,
/// `doc_id#sentence` as the record id, annotations distinguished by their
/// perspective tags. Token char offsets refer to the original document text.
pub fn write_training_set(examples: &[TrainingExample]) -> String {
    let mut out = String::new();
    for ex in examples {
        let rec = example_to_record(ex);
        out.push_str(&serde_json::to_string(&rec).expect("training record serializes"));
        out.push('\n');
    }
    out
}

pub fn read_training_set(content: &str) -> Result<Vec<TrainingExample>, CoreError> {
    let mut examples = Vec::new();
    for (index, line) in content.lines().filter(|l| !l.trim().is_empty()).enumerate() {
        let rec: UnifiedRecord = serde_json::from_str(line).map_err(|e| CoreError::Record {
            index,
            message: e.to_string(),
        })?;
        examples.push(record_to_example(&rec, index)?);
    }
    Ok(examples)
}

fn example_to_record(ex: &TrainingExample) -> UnifiedRecord {
    let mut entities = Vec::new();
    let mut relations = Vec::new();
    let mut soft_labels = Vec::new();

    for (head, anns) in [(HeadId::Sci, &ex.sci), (HeadId::Sem, &ex.sem)] {
        let Some(anns) = anns else { continue };
        let perspective = head.perspective();
        for e in &anns.entities {
            entities.push(EntityRec {
                id: e.id.clone(),
                start: e.span.start,
                end: e.span.end,
                entity_type: e.entity_type.clone(),
                perspective,
            });
        }
        for r in &anns.relations {
            relations.push(RelationRec {
                head: r.head.clone(),
                tail: r.tail.clone(),
                relation_type: r.relation_type.clone(),
                perspective,
            });
        }
    }
    for sl in &ex.soft_labels {
        soft_labels.push(SoftLabelRec {
            perspective: sl.head.perspective(),
            relation: sl.relation_index,
            agreement: sl.label.agreement,
            k: sl.label.probs.len(),
            target_class: sl.label.target_class,
        });
    }
    let entity_soft_labels: Vec<EntitySoftLabelRec> = ex
        .entity_soft_labels
        .iter()
        .map(|sl| EntitySoftLabelRec {
            perspective: sl.head.perspective(),
            entity: sl.entity_index,
            agreement: sl.label.agreement,
            k: sl.label.probs.len(),
            target_class: sl.label.target_class,
        })
        .collect();

    UnifiedRecord {
        doc_id: format!("{}#{}", ex.doc_id, ex.sentence_index),
        source: if ex.sci.is_some() {
            crate::corpus::Source::Scierc
        } else {
            crate::corpus::Source::Semeval
        },
        raw_text: String::new(),
        sentences: vec![SentenceRec {
            tokens: ex
                .tokens
                .iter()
                .map(|t| TokenRec {
                    text: t.text.clone(),
                    start: t.char_start,
                    end: t.char_end,
                })
                .collect(),
            entities,
            relations,
            soft_labels,
            entity_soft_labels,
        }],
    }
}

fn record_to_example(rec: &UnifiedRecord, index: usize) -> Result<TrainingExample, CoreError> {
    let bad = |message: String| CoreError::Record { index, message };
    let (doc_id, sentence_index) = match rec.doc_id.rsplit_once('#') {
        Some((id, si)) => (
            id.to_string(),
            si.parse::<usize>()
                .map_err(|_| bad(format!("bad sentence index in {}", rec.doc_id)))?,
        ),
        None => (rec.doc_id.clone(), 0),
    };
    let [sent] = rec.sentences.as_slice() else {
        return Err(bad("training record must hold exactly one sentence".into()));
    };

    let tokens: Vec<Token> = sent
        .tokens
        .iter()
        .enumerate()
        .map(|(i, t)| Token {
            index: i,
            text: t.text.clone(),
            char_start: t.start,
            char_end: t.end,
        })
        .collect();

    let mut heads: BTreeMap<HeadId, HeadAnnotations> = BTreeMap::new();
    for e in &sent.entities {
        let head = match e.perspective {
            Perspective::Sci => HeadId::Sci,
            Perspective::Sem => HeadId::Sem,
        };
        heads.entry(head).or_default().entities.push(EntityMention {
            id: e.id.clone(),
            span: Span::new(e.start, e.end),
            entity_type: e.entity_type.clone(),
            perspective: e.perspective,
        });
    }
    for r in &sent.relations {
        let head = match r.perspective {
            Perspective::Sci => HeadId::Sci,
            Perspective::Sem => HeadId::Sem,
        };
        heads
            .entry(head)
            .or_default()
            .relations
            .push(RelationMention {
                head: r.head.clone(),
                tail: r.tail.clone(),
                relation_type: r.relation_type.clone(),
                perspective: r.perspective,
            });
    }

    let mut soft_labels = Vec::new();
    for sl in &sent.soft_labels {
        let head = match sl.perspective {
            Perspective::Sci => HeadId::Sci,
            Perspective::Sem => HeadId::Sem,
        };
        let n_rel = heads.get(&head).map(|h| h.relations.len()).unwrap_or(0);
        if sl.relation >= n_rel {
            return Err(bad(format!(
                "soft label references relation {} of head {head:?} which has {n_rel}",
                sl.relation
            )));
        }
        soft_labels.push(SoftLabeledRelation {
            head,
            relation_index: sl.relation,
            label: make_soft_label(sl.target_class, sl.agreement, sl.k)
                .map_err(|e| bad(e.to_string()))?,
        });
    }
    let mut entity_soft_labels = Vec::new();
    for sl in &sent.entity_soft_labels {
        let head = match sl.perspective {
            Perspective::Sci => HeadId::Sci,
            Perspective::Sem => HeadId::Sem,
        };
        let n_ent = heads.get(&head).map(|h| h.entities.len()).unwrap_or(0);
        if sl.entity >= n_ent {
            return Err(bad(format!(
                "entity soft label references entity {} of head {head:?} which has {n_ent}",
                sl.entity
            )));
        }
        entity_soft_labels.push(SoftLabeledEntity {
            head,
            entity_index: sl.entity,
            label: make_soft_label(sl.target_class, sl.agreement, sl.k)
                .map_err(|e| bad(e.to_string()))?,
        });
    }

    Ok(TrainingExample {
        doc_id,
        sentence_index,
        tokens,
        sci: heads.remove(&HeadId::Sci),
        sem: heads.remove(&HeadId::Sem),
        soft_labels,
        entity_soft_labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn aligned() -> Vec<AlignedDocument> {
        fixtures::table2_aligned()
    }

    #[test]
    fn concat_doubles_every_sentence() {
        let aligned = aligned();
        let spec = SplitSpec::new(Strategy::Concat);
        let examples = build_training_set(&aligned, None, &spec).unwrap();
        let n_sentences: usize = aligned.iter().map(|p| p.sci_doc.sentences.len()).sum();
        assert_eq!(examples.len(), 2 * n_sentences);
        assert!(examples.iter().all(|e| e.sci.is_some() && e.sem.is_none()));
    }

    #[test]
    fn mixed_collapses_consistent_pairs() {
        // Fixture ex1: Usage/Used-for over the same exact pair.
        let aligned = aligned();
        let spec = SplitSpec::new(Strategy::Mixed);
        let examples = build_training_set(&aligned[..1], None, &spec).unwrap();
        let rels = &examples[0].sci.as_ref().unwrap().relations;
        assert_eq!(rels.len(), 1);
        assert_eq!(rels[0].relation_type, "Used-for");
    }

    #[test]
    fn mixed_sci_filters_the_sem_conflict() {
        // Fixture ex2: Used-for vs Model over the same pair.
        let aligned = aligned();
        let spec = SplitSpec::new(Strategy::MixedSci);
        let examples = build_training_set(&aligned[1..2], None, &spec).unwrap();
        let rels = &examples[0].sci.as_ref().unwrap().relations;
        assert_eq!(rels.len(), 1);
        assert_eq!(rels[0].relation_type, "Used-for");
    }

    #[test]
    fn mixed_keeps_both_conflicting_relations_by_default() {
        let aligned = aligned();
        let spec = SplitSpec::new(Strategy::Mixed);
        let examples = build_training_set(&aligned[1..2], None, &spec).unwrap();
        let mut labels: Vec<&str> = examples[0]
            .sci
            .as_ref()
            .unwrap()
            .relations
            .iter()
            .map(|r| r.relation_type.as_str())
            .collect();
        labels.sort();
        assert_eq!(labels, vec!["Feature-of", "Used-for"]);
    }

    #[test]
    fn mtl_populates_both_heads_without_duplication() {
        let aligned = aligned();
        let spec = SplitSpec::new(Strategy::Mtl);
        let examples = build_training_set(&aligned, None, &spec).unwrap();
        let n_sentences: usize = aligned.iter().map(|p| p.sci_doc.sentences.len()).sum();
        assert_eq!(examples.len(), n_sentences);
        assert!(examples.iter().all(|e| e.sci.is_some() && e.sem.is_some()));
        assert!(examples.iter().all(|e| e.soft_labels.is_empty()));
    }

    #[test]
    fn mtl_soft_attaches_one_label_per_relation() {
        let aligned = aligned();
        let spec = SplitSpec::new(Strategy::MtlSoft);
        let examples = build_training_set(&aligned, None, &spec).unwrap();
        for ex in &examples {
            let n_rel =
                ex.sci.as_ref().unwrap().relations.len() + ex.sem.as_ref().unwrap().relations.len();
            assert_eq!(ex.soft_labels.len(), n_rel);
        }
        // Fixture ex1 relation is high agreement on both heads.
        let ex1 = &examples[0];
        assert!(ex1
            .soft_labels
            .iter()
            .all(|sl| sl.label.agreement == Agreement::High));
    }

    #[test]
    fn cap_is_nested_and_deterministic() {
        let aligned = aligned();
        let spec = SplitSpec::new(Strategy::Concat);
        let examples = build_training_set(&aligned, None, &spec).unwrap();
        let caps: Vec<Vec<TrainingExample>> = [2usize, 4, 6]
            .iter()
            .map(|&n| cap_data_quantity(examples.clone(), n, 42).unwrap())
            .collect();
        for w in caps.windows(2) {
            for ex in &w[0] {
                assert!(w[1].contains(ex), "smaller cap must be subset of larger");
            }
        }
        let again = cap_data_quantity(examples.clone(), 4, 42).unwrap();
        assert_eq!(caps[1], again);
        assert!(cap_data_quantity(examples.clone(), 99, 1).is_err());
        assert!(cap_data_quantity(examples, 0, 1).unwrap().is_empty());
    }

    #[test]
    fn training_set_round_trips_through_unified_format() {
        let aligned = aligned();
        let spec = SplitSpec::new(Strategy::MtlSoft);
        let examples = build_training_set(&aligned, None, &spec).unwrap();
        let text = write_training_set(&examples);
        let back = read_training_set(&text).unwrap();
        assert_eq!(examples, back);
    }

    #[test]
    fn standard_split_mixes_dual_and_single_head() {
        let spec = fixtures::SyntheticSpec {
            n_overlap: 4,
            n_sem_only: 0,
            n_sci_only: 4,
            seed: 5,
        };
        let (sem, sci) = fixtures::synthetic_corpora(&spec);
        let (aligned, _, _) = crate::align::align_all(&sem, &sci).unwrap();
        let partition = fixtures::synthetic_partition(&sci, 0.25, 7);
        let (train, test) = build_scierc_standard_split(&sci, &aligned, &partition).unwrap();
        assert_eq!(test.len(), 2);
        assert!(!train.is_empty());
        for ex in &train {
            if ex.sem.is_none() {
                // Non-overlapped: every relation gets a medium soft label.
                let n_rel = ex.sci.as_ref().unwrap().relations.len();
                assert_eq!(ex.soft_labels.len(), n_rel);
                assert!(ex
                    .soft_labels
                    .iter()
                    .all(|sl| sl.label.agreement == Agreement::Medium));
            }
        }
    }

    #[test]
    fn concat_plus_forbids_the_consumed_test_set() {
        assert_eq!(
            SplitSpec::new(Strategy::ConcatPlusSci).forbidden_eval(),
            Some(Perspective::Sci)
        );
        assert_eq!(
            SplitSpec::new(Strategy::ConcatPlusSem).forbidden_eval(),
            Some(Perspective::Sem)
        );
        assert_eq!(SplitSpec::new(Strategy::Concat).forbidden_eval(), None);
        assert_eq!(SplitSpec::new(Strategy::Mixed).forbidden_eval(), None);
    }

    #[test]
    fn concat_plus_requires_extras() {
        let aligned = aligned();
        let err = build_training_set(&aligned, None, &SplitSpec::new(Strategy::ConcatPlusSci));
        assert!(err.is_err());
        let extras: Vec<Document> = Vec::new();
        let ok = build_training_set(
            &aligned,
            Some(&extras),
            &SplitSpec::new(Strategy::ConcatPlusSci),
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn zero_overlap_standard_split_is_all_single_head() {
        let spec = fixtures::SyntheticSpec {
            n_overlap: 0,
            n_sem_only: 2,
            n_sci_only: 4,
            seed: 5,
        };
        let (sem, sci) = fixtures::synthetic_corpora(&spec);
        let (aligned, _, _) = crate::align::align_all(&sem, &sci).unwrap();
        let partition = fixtures::synthetic_partition(&sci, 0.25, 7);
        let (train, _) = build_scierc_standard_split(&sci, &aligned, &partition).unwrap();
        assert!(train.iter().all(|ex| ex.sem.is_none()));
        assert!(train
            .iter()
            .flat_map(|ex| &ex.soft_labels)
            .all(|sl| sl.label.agreement == Agreement::Medium));
    }
}
