//! Corpus loading and the prediction/gold plumbing shared by scenarios.

use std::path::Path;

use anyhow::{bail, Context, Result};

use sciie_core::builder::{annotations_in_space, map_into_sci_naming, HeadId, LabelSpace};
use sciie_core::eval::{EntityItem, RelationItem};
use sciie_core::io::{parse_scierc, parse_scirex_abstracts, parse_semeval, read_unified};
use sciie_core::Document;
use sciie_model::JointModel;

use crate::config::DataPaths;

pub fn load_sem_corpus(data: &DataPaths) -> Result<Vec<Document>> {
    if let Some(path) = &data.sem_unified {
        return read_docs(path);
    }
    match (&data.semeval_abstracts, &data.semeval_relations) {
        (Some(abstracts), Some(relations)) => {
            let a = std::fs::read_to_string(abstracts)
                .with_context(|| format!("reading {}", abstracts.display()))?;
            let r = std::fs::read_to_string(relations)
                .with_context(|| format!("reading {}", relations.display()))?;
            let (docs, _) = parse_semeval(&a, &r)?;
            Ok(docs)
        }
        _ => bail!(
            "no SemEval corpus configured (sem_unified or semeval_abstracts + semeval_relations)"
        ),
    }
}

pub fn load_sci_corpus(data: &DataPaths) -> Result<Vec<Document>> {
    if let Some(path) = &data.sci_unified {
        return read_docs(path);
    }
    match &data.scierc_json {
        Some(path) => {
            let content = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let (docs, _) = parse_scierc(&content)?;
            Ok(docs)
        }
        None => bail!("no SciERC corpus configured (sci_unified or scierc_json)"),
    }
}

pub fn load_scirex_corpus(data: &DataPaths) -> Result<Vec<Document>> {
    if let Some(path) = &data.scirex_unified {
        return read_docs(path);
    }
    match &data.scirex_json {
        Some(path) => {
            let content = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let (docs, _) = parse_scirex_abstracts(&content)?;
            Ok(docs)
        }
        None => bail!("no SciREX corpus configured (scirex_unified or scirex_json)"),
    }
}

fn read_docs(path: &Path) -> Result<Vec<Document>> {
    let content =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(read_unified(&content)?)
}

/// Flattened evaluation set: sentences plus gold items keyed by running
/// sentence index.
#[derive(Debug, Clone, Default)]
pub struct EvalData {
    pub sentences: Vec<Vec<String>>,
    pub gold_entities: Vec<EntityItem>,
    pub gold_relations: Vec<RelationItem>,
}

/// Project gold annotations of `head` into the label space; with
/// `to_sci_naming`, SemEval relation labels are mapped into SciERC naming
/// (for scoring against the canonical single head).
pub fn eval_data(
    docs: &[Document],
    head: HeadId,
    space: &LabelSpace,
    to_sci_naming: bool,
) -> EvalData {
    let mut out = EvalData::default();
    for doc in docs {
        for si in 0..doc.sentences.len() {
            let sentence_key = out.sentences.len();
            let mut anns = annotations_in_space(doc, si, head, space);
            if to_sci_naming {
                anns = map_into_sci_naming(anns);
            }
            for e in &anns.entities {
                out.gold_entities.push(EntityItem {
                    sentence: sentence_key,
                    span: e.span,
                    entity_type: e.entity_type.clone(),
                });
            }
            for r in &anns.relations {
                let head_ent = anns.entities.iter().find(|e| e.id == r.head);
                let tail_ent = anns.entities.iter().find(|e| e.id == r.tail);
                let (Some(h), Some(t)) = (head_ent, tail_ent) else {
                    continue;
                };
                out.gold_relations.push(RelationItem {
                    sentence: sentence_key,
                    head: h.span,
                    tail: t.span,
                    relation_type: r.relation_type.clone(),
                    head_type: h.entity_type.clone(),
                    tail_type: t.entity_type.clone(),
                });
            }
            out.sentences.push(
                doc.sentences[si]
                    .texts()
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
            );
        }
    }
    out
}

/// Gold entities of a SciREX corpus, native types.
pub fn scirex_eval_data(docs: &[Document]) -> EvalData {
    let mut out = EvalData::default();
    for doc in docs {
        for sentence in &doc.sentences {
            let sentence_key = out.sentences.len();
            for e in &sentence.entities {
                out.gold_entities.push(EntityItem {
                    sentence: sentence_key,
                    span: e.span,
                    entity_type: e.entity_type.clone(),
                });
            }
            out.sentences
                .push(sentence.texts().iter().map(|s| s.to_string()).collect());
        }
    }
    out
}

/// Run the model over every sentence, producing items on the same sentence
/// grid as the gold.
pub fn predict_items(
    model: &JointModel,
    sentences: &[Vec<String>],
    head: HeadId,
) -> (Vec<EntityItem>, Vec<RelationItem>) {
    let mut entities = Vec::new();
    let mut relations = Vec::new();
    for (sentence_key, tokens) in sentences.iter().enumerate() {
        let refs: Vec<&str> = tokens.iter().map(|s| s.as_str()).collect();
        let pred = model.predict(&refs, head);
        for e in pred.entities {
            entities.push(EntityItem {
                sentence: sentence_key,
                span: e.span,
                entity_type: e.entity_type,
            });
        }
        for r in pred.relations {
            relations.push(RelationItem {
                sentence: sentence_key,
                head: r.head,
                tail: r.tail,
                relation_type: r.relation_type,
                head_type: r.head_type,
                tail_type: r.tail_type,
            });
        }
    }
    (entities, relations)
}
