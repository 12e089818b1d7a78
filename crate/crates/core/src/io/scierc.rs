//! Parser for the SciERC JSON-lines release.
//!
//! Each line holds one document with pre-tokenized sentences, NER triples
//! and relation 5-tuples. Token indices in the release are document-level
//! with inclusive ends; they are converted to sentence-local half-open
//! spans. SciERC's own token lists are trusted verbatim. Coreference
//! clusters are ignored.

use serde::Deserialize;

use crate::corpus::{
    Document, EntityMention, Perspective, RelationMention, Sentence, Source, Span, Token,
};
use crate::error::CoreError;
use crate::io::ParseReport;

/// Relation 5-tuple of the release: head start/end, tail start/end, label.
type RelationRow = (usize, usize, usize, usize, String);

#[derive(Deserialize)]
struct SciercRaw {
    #[serde(alias = "doc_id")]
    doc_key: String,
    sentences: Vec<Vec<String>>,
    #[serde(default)]
    ner: Vec<Vec<(usize, usize, String)>>,
    #[serde(default)]
    relations: Vec<Vec<RelationRow>>,
}

pub fn parse_scierc(json_content: &str) -> Result<(Vec<Document>, ParseReport), CoreError> {
    let mut report = ParseReport::new(Source::Scierc);
    let mut docs = Vec::new();

    for (lineno, line) in json_content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let raw: SciercRaw = serde_json::from_str(line)
            .map_err(|e| CoreError::parse(format!("scierc line {}", lineno + 1), e.to_string()))?;
        docs.push(convert(raw, &mut report)?);
    }

    report.documents = docs.len();
    report.entities = docs.iter().map(Document::entity_count).sum();
    report.relations = docs.iter().map(Document::relation_count).sum();
    Ok((docs, report))
}

fn convert(raw: SciercRaw, report: &mut ParseReport) -> Result<Document, CoreError> {
    let doc_id = raw.doc_key.clone();

    // Sentence offsets in document-level token indices, and tokens with
    // char offsets into the space-joined raw text.
    let mut offsets = Vec::with_capacity(raw.sentences.len());
    let mut cum = 0usize;
    for sent in &raw.sentences {
        offsets.push(cum);
        cum += sent.len();
    }

    let mut raw_text = String::new();
    let mut char_pos = 0usize;
    let mut sentences: Vec<Sentence> = Vec::with_capacity(raw.sentences.len());
    for sent_tokens in &raw.sentences {
        let mut tokens = Vec::with_capacity(sent_tokens.len());
        for (ti, text) in sent_tokens.iter().enumerate() {
            if !raw_text.is_empty() {
                raw_text.push(' ');
                char_pos += 1;
            }
            let len = text.chars().count();
            tokens.push(Token {
                index: ti,
                text: text.clone(),
                char_start: char_pos,
                char_end: char_pos + len,
            });
            raw_text.push_str(text);
            char_pos += len;
        }
        sentences.push(Sentence {
            tokens,
            entities: Vec::new(),
            relations: Vec::new(),
        });
    }

    let locate = |start: usize, end_incl: usize| -> Result<(usize, Span), CoreError> {
        let si = match offsets.iter().rposition(|&o| o <= start) {
            Some(si) => si,
            None => {
                return Err(CoreError::parse(
                    &doc_id,
                    format!("span start {start} before first sentence"),
                ))
            }
        };
        let local_start = start - offsets[si];
        let local_end = end_incl + 1 - offsets[si];
        let n = raw.sentences[si].len();
        if end_incl < start || local_end > n {
            return Err(CoreError::parse(
                &doc_id,
                format!("span [{start}, {end_incl}] out of range for sentence {si} (len {n})"),
            ));
        }
        Ok((si, Span::new(local_start, local_end)))
    };

    for (si, ners) in raw.ner.iter().enumerate() {
        for (k, (s, e, label)) in ners.iter().enumerate() {
            let (sent_idx, span) = locate(*s, *e)?;
            if sent_idx != si {
                report.warnings.push(format!(
                    "{doc_id}: ner span [{s}, {e}] listed under sentence {si} but lies in {sent_idx}"
                ));
            }
            sentences[sent_idx].entities.push(EntityMention {
                id: format!("s{si}e{k}"),
                span,
                entity_type: label.clone(),
                perspective: Perspective::Sci,
            });
        }
    }

    for rels in raw.relations.iter() {
        for (h1, h2, t1, t2, label) in rels {
            let (hs, head_span) = locate(*h1, *h2)?;
            let (ts, tail_span) = locate(*t1, *t2)?;
            if hs != ts {
                report.dropped_relations += 1;
                report
                    .warnings
                    .push(format!("{doc_id}: dropped cross-sentence relation {label}"));
                continue;
            }
            let find = |span: Span| {
                sentences[hs]
                    .entities
                    .iter()
                    .find(|e| e.span == span)
                    .map(|e| e.id.clone())
            };
            let head = find(head_span).ok_or_else(|| {
                CoreError::parse(
                    &doc_id,
                    format!("relation {label} head span {head_span} is not an entity"),
                )
            })?;
            let tail = find(tail_span).ok_or_else(|| {
                CoreError::parse(
                    &doc_id,
                    format!("relation {label} tail span {tail_span} is not an entity"),
                )
            })?;
            sentences[hs].relations.push(RelationMention {
                head,
                tail,
                relation_type: label.clone(),
                perspective: Perspective::Sci,
            });
        }
    }

    Ok(Document {
        doc_id,
        source: Source::Scierc,
        raw_text,
        sentences,
    })
}
