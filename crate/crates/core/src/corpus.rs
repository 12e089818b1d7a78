//! Unified in-memory corpus model.
//!
//! All types are immutable after construction and safe to share across
//! concurrent readers. Spans are token-indexed and half-open: `[start, end)`,
//! so `width = end - start`.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Which dataset's annotation view a mention belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Perspective {
    /// SciERC annotations.
    Sci,
    /// SemEval-2018 Task 7 annotations.
    Sem,
}

impl fmt::Display for Perspective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Perspective::Sci => write!(f, "sci"),
            Perspective::Sem => write!(f, "sem"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Semeval,
    Scierc,
    Scirex,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Semeval => write!(f, "semeval"),
            Source::Scierc => write!(f, "scierc"),
            Source::Scirex => write!(f, "scirex"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    /// Position within the sentence.
    pub index: usize,
    pub text: String,
    /// Character offsets into the document raw text.
    pub char_start: usize,
    pub char_end: usize,
}

/// Token-indexed half-open span within one sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn width(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    /// Number of tokens shared with another span.
    pub fn overlap(&self, other: &Span) -> usize {
        let lo = self.start.max(other.start);
        let hi = self.end.min(other.end);
        hi.saturating_sub(lo)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityMention {
    pub id: String,
    pub span: Span,
    pub entity_type: String,
    pub perspective: Perspective,
}

/// Directed relation between two entity mentions of the same sentence.
/// Stored head → tail; parser-level REVERSE flags are already resolved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationMention {
    pub head: String,
    pub tail: String,
    pub relation_type: String,
    pub perspective: Perspective,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Sentence {
    pub tokens: Vec<Token>,
    pub entities: Vec<EntityMention>,
    pub relations: Vec<RelationMention>,
}

impl Sentence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn entity(&self, id: &str) -> Option<&EntityMention> {
        self.entities.iter().find(|e| e.id == id)
    }

    pub fn texts(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }

    /// Surface text of a token span, joined with single spaces.
    pub fn span_text(&self, span: &Span) -> String {
        self.tokens[span.start..span.end]
            .iter()
            .map(|t| t.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub source: Source,
    pub raw_text: String,
    pub sentences: Vec<Sentence>,
}

impl Document {
    pub fn entity_count(&self) -> usize {
        self.sentences.iter().map(|s| s.entities.len()).sum()
    }

    pub fn relation_count(&self) -> usize {
        self.sentences.iter().map(|s| s.relations.len()).sum()
    }
}

/// Check every structural invariant of a document. Violations are data, not
/// errors: an empty list means the document is well formed.
pub fn validate_document(doc: &Document) -> Vec<String> {
    let mut violations = Vec::new();
    let text_len = doc.raw_text.chars().count();

    let mut prev_sentence_end = 0usize;
    for (si, sentence) in doc.sentences.iter().enumerate() {
        let n = sentence.len();

        // Token ordering and character ranges.
        let mut prev_char_end = prev_sentence_end;
        for token in &sentence.tokens {
            if token.char_start >= token.char_end {
                violations.push(format!(
                    "{}: sentence {si} token {} ({:?}): char_start {} >= char_end {}",
                    doc.doc_id, token.index, token.text, token.char_start, token.char_end
                ));
            }
            if token.char_start < prev_char_end {
                violations.push(format!(
                    "{}: sentence {si} token {} ({:?}): overlaps preceding token range",
                    doc.doc_id, token.index, token.text
                ));
            }
            if token.char_end > text_len {
                violations.push(format!(
                    "{}: sentence {si} token {} ({:?}): char_end {} beyond text length {}",
                    doc.doc_id, token.index, token.text, token.char_end, text_len
                ));
            }
            prev_char_end = prev_char_end.max(token.char_end);
        }
        if let Some(tok) = sentence.tokens.last() {
            prev_sentence_end = tok.char_end;
        }
        for (ti, token) in sentence.tokens.iter().enumerate() {
            if token.index != ti {
                violations.push(format!(
                    "{}: sentence {si} token {ti}: stored index {} disagrees with position",
                    doc.doc_id, token.index
                ));
            }
        }

        // Span bounds and duplicate entity ids.
        let mut seen_ids = HashSet::new();
        for entity in &sentence.entities {
            if entity.span.start >= entity.span.end || entity.span.end > n {
                violations.push(format!(
                    "{}: sentence {si} entity {}: span {} out of bounds for sentence length {n}",
                    doc.doc_id, entity.id, entity.span
                ));
            }
            if !seen_ids.insert(entity.id.as_str()) {
                violations.push(format!(
                    "{}: sentence {si}: duplicate entity id {}",
                    doc.doc_id, entity.id
                ));
            }
        }

        // Relation endpoints must resolve within this sentence.
        for relation in &sentence.relations {
            if relation.head == relation.tail {
                violations.push(format!(
                    "{}: sentence {si} relation {}: head equals tail ({})",
                    doc.doc_id, relation.relation_type, relation.head
                ));
            }
            for endpoint in [&relation.head, &relation.tail] {
                if sentence.entity(endpoint).is_none() {
                    violations.push(format!(
                        "{}: sentence {si} relation {} ({} -> {}): endpoint {} not an entity of this sentence",
                        doc.doc_id,
                        relation.relation_type,
                        relation.head,
                        relation.tail,
                        endpoint
                    ));
                }
            }
        }
    }

    violations
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn token(index: usize, text: &str, start: usize) -> Token {
        Token {
            index,
            text: text.to_string(),
            char_start: start,
            char_end: start + text.chars().count(),
        }
    }

    fn two_sentence_fixture() -> Document {
        // "a b c. d e."
        let s1 = Sentence {
            tokens: vec![token(0, "a", 0), token(1, "b", 2), token(2, "c.", 4)],
            entities: vec![
                EntityMention {
                    id: "e1".into(),
                    span: Span::new(0, 1),
                    entity_type: "Method".into(),
                    perspective: Perspective::Sci,
                },
                EntityMention {
                    id: "e2".into(),
                    span: Span::new(1, 3),
                    entity_type: "Task".into(),
                    perspective: Perspective::Sci,
                },
            ],
            relations: vec![RelationMention {
                head: "e1".into(),
                tail: "e2".into(),
                relation_type: "Used-for".into(),
                perspective: Perspective::Sci,
            }],
        };
        let s2 = Sentence {
            tokens: vec![token(0, "d", 7), token(1, "e.", 9)],
            entities: vec![EntityMention {
                id: "e3".into(),
                span: Span::new(0, 1),
                entity_type: "Metric".into(),
                perspective: Perspective::Sci,
            }],
            relations: vec![],
        };
        Document {
            doc_id: "doc1".into(),
            source: Source::Scierc,
            raw_text: "a b c. d e.".into(),
            sentences: vec![s1, s2],
        }
    }

    #[test]
    fn well_formed_fixture_validates() {
        assert_eq!(
            validate_document(&two_sentence_fixture()),
            Vec::<String>::new()
        );
    }

    #[test]
    fn cross_sentence_relation_is_flagged() {
        let mut doc = two_sentence_fixture();
        // Endpoint e3 lives in sentence 1, not sentence 0.
        doc.sentences[0].relations.push(RelationMention {
            head: "e1".into(),
            tail: "e3".into(),
            relation_type: "Compare".into(),
            perspective: Perspective::Sci,
        });
        let violations = validate_document(&doc);
        assert_eq!(violations.len(), 1);
        assert!(violations[0].contains("e3"));
        assert!(violations[0].contains("Compare"));
    }

    #[test]
    fn span_beyond_sentence_is_flagged() {
        let mut doc = two_sentence_fixture();
        doc.sentences[1].entities[0].span = Span::new(0, 5);
        let violations = validate_document(&doc);
        assert_eq!(violations.len(), 1);
        assert!(violations[0].contains("[0, 5)"));
    }

    #[test]
    fn span_accessors() {
        let s = Span::new(4, 9);
        assert_eq!(s.width(), 5);
        assert_eq!(s.overlap(&Span::new(4, 5)), 1);
        assert_eq!(s.overlap(&Span::new(1, 2)), 0);
        assert_eq!(s.overlap(&Span::new(4, 9)), 5);
    }
}
