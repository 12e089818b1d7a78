//! Parser for SciREX JSON-lines, restricted to the abstract section.
//!
//! SciREX is a full-text document-level corpus; only the first section (the
//! abstract) of each paper is extracted, with sentences, words and mention
//! spans given as half-open index ranges over the flat word list. Entity
//! types are restricted to the four released for NER evaluation; there are
//! no relations.

use serde::Deserialize;

use crate::corpus::{Document, EntityMention, Perspective, Sentence, Source, Span, Token};
use crate::error::CoreError;
use crate::io::ParseReport;
use crate::labels::SCIREX_ENTITY_TYPES;

#[derive(Deserialize)]
struct ScirexRaw {
    doc_id: String,
    words: Vec<String>,
    sentences: Vec<(usize, usize)>,
    #[serde(default)]
    sections: Vec<(usize, usize)>,
    #[serde(default)]
    ner: Vec<(usize, usize, String)>,
}

pub fn parse_scirex_abstracts(
    json_content: &str,
) -> Result<(Vec<Document>, ParseReport), CoreError> {
    let mut report = ParseReport::new(Source::Scirex);
    let mut docs = Vec::new();

    for (lineno, line) in json_content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let raw: ScirexRaw = serde_json::from_str(line)
            .map_err(|e| CoreError::parse(format!("scirex line {}", lineno + 1), e.to_string()))?;
        if let Some(doc) = convert(raw, &mut report)? {
            docs.push(doc);
        }
    }

    report.documents = docs.len();
    report.entities = docs.iter().map(Document::entity_count).sum();
    Ok((docs, report))
}

fn convert(raw: ScirexRaw, report: &mut ParseReport) -> Result<Option<Document>, CoreError> {
    let doc_id = raw.doc_id.clone();
    let Some(&(abs_start, abs_end)) = raw.sections.first() else {
        report
            .warnings
            .push(format!("{doc_id}: no sections; skipped"));
        return Ok(None);
    };
    if abs_start >= abs_end || abs_end > raw.words.len() {
        report.warnings.push(format!(
            "{doc_id}: empty or out-of-range abstract section; skipped"
        ));
        return Ok(None);
    }

    // Sentences fully inside the abstract.
    let sent_ranges: Vec<(usize, usize)> = raw
        .sentences
        .iter()
        .copied()
        .filter(|&(s, e)| s >= abs_start && e <= abs_end && s < e)
        .collect();
    if sent_ranges.is_empty() {
        report
            .warnings
            .push(format!("{doc_id}: abstract has no sentences; skipped"));
        return Ok(None);
    }

    let mut raw_text = String::new();
    let mut char_pos = 0usize;
    let mut sentences = Vec::with_capacity(sent_ranges.len());
    for &(s, e) in &sent_ranges {
        let mut tokens = Vec::with_capacity(e - s);
        for (ti, word) in raw.words[s..e].iter().enumerate() {
            if !raw_text.is_empty() {
                raw_text.push(' ');
                char_pos += 1;
            }
            let len = word.chars().count();
            tokens.push(Token {
                index: ti,
                text: word.clone(),
                char_start: char_pos,
                char_end: char_pos + len,
            });
            raw_text.push_str(word);
            char_pos += len;
        }
        sentences.push(Sentence {
            tokens,
            entities: Vec::new(),
            relations: Vec::new(),
        });
    }

    let mut kept = 0usize;
    for (s, e, label) in &raw.ner {
        if !SCIREX_ENTITY_TYPES.contains(&label.as_str()) {
            continue;
        }
        // Entities outside the abstract are dropped by construction.
        let Some(si) = sent_ranges
            .iter()
            .position(|&(ss, se)| *s >= ss && *e <= se)
        else {
            continue;
        };
        let (ss, _) = sent_ranges[si];
        sentences[si].entities.push(EntityMention {
            id: format!("s{si}e{kept}"),
            span: Span::new(s - ss, e - ss),
            entity_type: label.clone(),
            perspective: Perspective::Sci,
        });
        kept += 1;
    }

    Ok(Some(Document {
        doc_id,
        source: Source::Scirex,
        raw_text,
        sentences,
    }))
}
