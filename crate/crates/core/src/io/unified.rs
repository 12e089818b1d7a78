//! Line-delimited unified interchange format.
//!
//! One record per line, UTF-8, deterministic key order (struct declaration
//! order), so output is byte-stable. Entities and relations carry their
//! perspective tag, which lets a single record hold both annotation views of
//! the same sentence. Soft labels are stored as (relation index, agreement,
//! K, target class); probabilities are recomputed on load, never stored.

use serde::{Deserialize, Serialize};

use crate::corpus::{
    Document, EntityMention, Perspective, RelationMention, Sentence, Source, Span, Token,
};
use crate::error::CoreError;
use crate::softlabel::Agreement;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenRec {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityRec {
    pub id: String,
    pub start: usize,
    pub end: usize,
    #[serde(rename = "type")]
    pub entity_type: String,
    pub perspective: Perspective,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationRec {
    pub head: String,
    pub tail: String,
    #[serde(rename = "type")]
    pub relation_type: String,
    pub perspective: Perspective,
}

/// Serialized soft label: which relation of the sentence it grades (index
/// into the perspective's relation list) and how to rebuild the vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoftLabelRec {
    pub perspective: Perspective,
    pub relation: usize,
    pub agreement: Agreement,
    pub k: usize,
    pub target_class: usize,
}

/// Soft label over entity classes, present only when the entity-head
/// extension is enabled at build time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntitySoftLabelRec {
    pub perspective: Perspective,
    pub entity: usize,
    pub agreement: Agreement,
    pub k: usize,
    pub target_class: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceRec {
    pub tokens: Vec<TokenRec>,
    pub entities: Vec<EntityRec>,
    pub relations: Vec<RelationRec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub soft_labels: Vec<SoftLabelRec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub entity_soft_labels: Vec<EntitySoftLabelRec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnifiedRecord {
    pub doc_id: String,
    pub source: Source,
    pub raw_text: String,
    pub sentences: Vec<SentenceRec>,
}

impl From<&Document> for UnifiedRecord {
    fn from(doc: &Document) -> Self {
        UnifiedRecord {
            doc_id: doc.doc_id.clone(),
            source: doc.source,
            raw_text: doc.raw_text.clone(),
            sentences: doc.sentences.iter().map(sentence_to_rec).collect(),
        }
    }
}

fn sentence_to_rec(s: &Sentence) -> SentenceRec {
    SentenceRec {
        tokens: s
            .tokens
            .iter()
            .map(|t| TokenRec {
                text: t.text.clone(),
                start: t.char_start,
                end: t.char_end,
            })
            .collect(),
        entities: s
            .entities
            .iter()
            .map(|e| EntityRec {
                id: e.id.clone(),
                start: e.span.start,
                end: e.span.end,
                entity_type: e.entity_type.clone(),
                perspective: e.perspective,
            })
            .collect(),
        relations: s
            .relations
            .iter()
            .map(|r| RelationRec {
                head: r.head.clone(),
                tail: r.tail.clone(),
                relation_type: r.relation_type.clone(),
                perspective: r.perspective,
            })
            .collect(),
        soft_labels: Vec::new(),
        entity_soft_labels: Vec::new(),
    }
}

pub(crate) fn rec_to_sentence(rec: &SentenceRec) -> Sentence {
    Sentence {
        tokens: rec
            .tokens
            .iter()
            .enumerate()
            .map(|(i, t)| Token {
                index: i,
                text: t.text.clone(),
                char_start: t.start,
                char_end: t.end,
            })
            .collect(),
        entities: rec
            .entities
            .iter()
            .map(|e| EntityMention {
                id: e.id.clone(),
                span: Span::new(e.start, e.end),
                entity_type: e.entity_type.clone(),
                perspective: e.perspective,
            })
            .collect(),
        relations: rec
            .relations
            .iter()
            .map(|r| RelationMention {
                head: r.head.clone(),
                tail: r.tail.clone(),
                relation_type: r.relation_type.clone(),
                perspective: r.perspective,
            })
            .collect(),
    }
}

impl UnifiedRecord {
    pub fn into_document(&self) -> Document {
        Document {
            doc_id: self.doc_id.clone(),
            source: self.source,
            raw_text: self.raw_text.clone(),
            sentences: self.sentences.iter().map(rec_to_sentence).collect(),
        }
    }
}

/// Serialize documents as one compact JSON record per line.
pub fn write_unified(docs: &[Document]) -> String {
    let mut out = String::new();
    for doc in docs {
        let rec = UnifiedRecord::from(doc);
        out.push_str(&serde_json::to_string(&rec).expect("unified record serializes"));
        out.push('\n');
    }
    out
}

/// Parse unified-format content back into documents. Schema violations name
/// the offending record index.
pub fn read_unified(content: &str) -> Result<Vec<Document>, CoreError> {
    read_unified_records(content)
        .map(|recs| recs.iter().map(UnifiedRecord::into_document).collect())
}

pub fn read_unified_records(content: &str) -> Result<Vec<UnifiedRecord>, CoreError> {
    let mut records = Vec::new();
    for (index, line) in content.lines().filter(|l| !l.trim().is_empty()).enumerate() {
        let rec: UnifiedRecord = serde_json::from_str(line).map_err(|e| CoreError::Record {
            index,
            message: e.to_string(),
        })?;
        records.push(rec);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_doc() -> Document {
        let tokens = vec![
            Token {
                index: 0,
                text: "a".into(),
                char_start: 0,
                char_end: 1,
            },
            Token {
                index: 1,
                text: "b".into(),
                char_start: 2,
                char_end: 3,
            },
        ];
        Document {
            doc_id: "d".into(),
            source: Source::Scierc,
            raw_text: "a b".into(),
            sentences: vec![Sentence {
                tokens,
                entities: vec![EntityMention {
                    id: "e1".into(),
                    span: Span::new(0, 2),
                    entity_type: "Method".into(),
                    perspective: Perspective::Sci,
                }],
                relations: vec![],
            }],
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let docs = vec![sample_doc()];
        let text = write_unified(&docs);
        let back = read_unified(&text).unwrap();
        assert_eq!(docs, back);
    }

    #[test]
    fn empty_corpus_round_trips() {
        let text = write_unified(&[]);
        assert!(text.is_empty());
        assert!(read_unified(&text).unwrap().is_empty());
    }

    #[test]
    fn output_is_byte_stable() {
        let docs = vec![sample_doc()];
        assert_eq!(write_unified(&docs), write_unified(&docs));
    }

    #[test]
    fn unknown_source_tag_errors_at_record_index() {
        let line = r#"{"doc_id":"d","source":"nonsense","raw_text":"","sentences":[]}"#;
        let err = read_unified(line).unwrap_err();
        assert!(matches!(err, CoreError::Record { index: 0, .. }));
    }
}
