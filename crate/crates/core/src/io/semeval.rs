//! Parser for the SemEval-2018 Task 7 sub-task 2 release: abstracts with
//! inline `<entity id="...">` markers plus a separate relation list of the
//! form `LABEL(id1,id2[,REVERSE])`.
//!
//! Inline markers are stripped and entity offsets recomputed over the clean
//! text before tokenization, so spans are defined over comparable text. The
//! title, when present, is kept as the first line of the document text.

use std::collections::HashMap;

use crate::corpus::{
    Document, EntityMention, Perspective, RelationMention, Sentence, Source, Span,
};
use crate::error::CoreError;
use crate::io::segment::{RuleSegmenter, Segmenter};
use crate::io::{tokenize, ParseReport};
use crate::labels::ENTITY_UNTYPED;

/// Raw relation labels of the release mapped to the names used throughout
/// the toolkit. Already-normalized names pass through unchanged.
fn normalize_relation_label(raw: &str) -> String {
    match raw.trim().to_ascii_uppercase().as_str() {
        "USAGE" => "Usage".to_string(),
        "RESULT" => "Result".to_string(),
        "MODEL-FEATURE" | "MODEL_FEATURE" | "MODEL" => "Model".to_string(),
        "PART_WHOLE" | "PART-WHOLE" => "Part-whole".to_string(),
        "TOPIC" => "Topic".to_string(),
        "COMPARE" | "COMPARISON" => "Comparison".to_string(),
        _ => raw.trim().to_string(),
    }
}

fn decode_xml_entities(s: &str) -> String {
    s.replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&quot;", "\"")
        .replace("&apos;", "'")
        .replace("&amp;", "&")
}

/// One inline entity found while stripping markers: id plus char range in
/// the clean text.
struct InlineEntity {
    id: String,
    char_start: usize,
    char_end: usize,
}

/// Strip `<entity id="...">...</entity>` markers, returning clean text and
/// the entity char ranges (in chars of the clean text).
fn strip_entity_markers(
    markup: &str,
    context: &str,
) -> Result<(String, Vec<InlineEntity>), CoreError> {
    let mut clean = String::new();
    let mut clean_len = 0usize; // in chars
    let mut entities = Vec::new();
    let mut rest = markup;

    while let Some(open) = rest.find("<entity") {
        let before = &rest[..open];
        let before = decode_xml_entities(before);
        clean_len += before.chars().count();
        clean.push_str(&before);

        let tail = &rest[open..];
        let tag_end = tail
            .find('>')
            .ok_or_else(|| CoreError::parse(context, "unterminated <entity> tag"))?;
        let tag = &tail[..tag_end];
        let id = tag
            .split("id=\"")
            .nth(1)
            .and_then(|s| s.split('"').next())
            .ok_or_else(|| CoreError::parse(context, "entity tag without id attribute"))?
            .to_string();
        let after_tag = &tail[tag_end + 1..];
        let close = after_tag
            .find("</entity>")
            .ok_or_else(|| CoreError::parse(context, format!("entity {id} not closed")))?;
        let surface = decode_xml_entities(&after_tag[..close]);
        let surface_len = surface.chars().count();
        entities.push(InlineEntity {
            id,
            char_start: clean_len,
            char_end: clean_len + surface_len,
        });
        clean.push_str(&surface);
        clean_len += surface_len;
        rest = &after_tag[close + "</entity>".len()..];
    }
    let trailing = decode_xml_entities(rest);
    clean.push_str(&trailing);
    Ok((clean, entities))
}

fn element_content<'a>(block: &'a str, name: &str) -> Option<&'a str> {
    let open = format!("<{name}>");
    let close = format!("</{name}>");
    let start = block.find(&open)? + open.len();
    let end = block[start..].find(&close)? + start;
    Some(&block[start..end])
}

struct AbstractDraft {
    doc_id: String,
    raw_text: String,
    // entity id -> (sentence index, token span)
    entity_positions: HashMap<String, (usize, Span)>,
    sentences: Vec<Sentence>,
}

fn build_document(
    doc_id: &str,
    clean_text: &str,
    inline: Vec<InlineEntity>,
    report: &mut ParseReport,
) -> AbstractDraft {
    let segmenter = RuleSegmenter;
    let ranges = segmenter.segment(clean_text);
    let chars: Vec<char> = clean_text.chars().collect();

    let mut sentences: Vec<Sentence> = Vec::new();
    for &(s, e) in &ranges {
        let slice: String = chars[s..e].iter().collect();
        let mut tokens = tokenize(&slice);
        for t in &mut tokens {
            t.char_start += s;
            t.char_end += s;
        }
        sentences.push(Sentence {
            tokens,
            entities: Vec::new(),
            relations: Vec::new(),
        });
    }

    let mut entity_positions = HashMap::new();
    for ent in inline {
        // Sentence containing the entity start.
        let si = match ranges
            .iter()
            .position(|&(s, e)| ent.char_start >= s && ent.char_start < e)
        {
            Some(si) => si,
            None => {
                report
                    .warnings
                    .push(format!("{doc_id}: entity {} outside any sentence", ent.id));
                continue;
            }
        };
        let sent = &mut sentences[si];
        let mut first = None;
        let mut last = None;
        for tok in &sent.tokens {
            if tok.char_end > ent.char_start && tok.char_start < ent.char_end {
                if first.is_none() {
                    first = Some(tok.index);
                }
                last = Some(tok.index);
            }
        }
        let (Some(first), Some(last)) = (first, last) else {
            report
                .warnings
                .push(format!("{doc_id}: entity {} covers no tokens", ent.id));
            continue;
        };
        let span = Span::new(first, last + 1);
        sent.entities.push(EntityMention {
            id: ent.id.clone(),
            span,
            entity_type: ENTITY_UNTYPED.to_string(),
            perspective: Perspective::Sem,
        });
        entity_positions.insert(ent.id, (si, span));
    }

    AbstractDraft {
        doc_id: doc_id.to_string(),
        raw_text: clean_text.to_string(),
        entity_positions,
        sentences,
    }
}

/// Parse the sub-task 2 abstracts and relation list into documents with
/// perspective SEM. `REVERSE` flags are resolved so stored relations are
/// always directed head → tail.
pub fn parse_semeval(
    entity_file_content: &str,
    relation_file_content: &str,
) -> Result<(Vec<Document>, ParseReport), CoreError> {
    let mut report = ParseReport::new(Source::Semeval);
    let mut drafts: Vec<AbstractDraft> = Vec::new();

    let mut rest = entity_file_content;
    while let Some(open) = rest.find("<text") {
        let tail = &rest[open..];
        let end = tail
            .find("</text>")
            .ok_or_else(|| CoreError::parse("semeval", "unterminated <text> element"))?;
        let block = &tail[..end];
        let doc_id = block
            .split("id=\"")
            .nth(1)
            .and_then(|s| s.split('"').next())
            .ok_or_else(|| CoreError::parse("semeval", "<text> element without id"))?
            .to_string();

        let title = element_content(block, "title").map(str::trim);
        let abstract_markup = element_content(block, "abstract")
            .map(str::trim)
            .ok_or_else(|| CoreError::parse("semeval", format!("{doc_id}: missing <abstract>")))?;

        // Title (when present) becomes the first line of the clean text so
        // its entities stay addressable and segmentation keeps it separate.
        let combined = match title {
            Some(t) if !t.is_empty() => format!("{t}\n{abstract_markup}"),
            _ => abstract_markup.to_string(),
        };
        let (clean, inline) = strip_entity_markers(&combined, &doc_id)?;
        drafts.push(build_document(&doc_id, &clean, inline, &mut report));
        rest = &tail[end + "</text>".len()..];
    }

    // Global entity registry for relation resolution.
    let mut registry: HashMap<String, usize> = HashMap::new();
    for (di, draft) in drafts.iter().enumerate() {
        for id in draft.entity_positions.keys() {
            registry.insert(id.clone(), di);
        }
    }

    for (lineno, line) in relation_file_content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let context = format!("semeval relations line {}", lineno + 1);
        let open = line
            .find('(')
            .ok_or_else(|| CoreError::parse(&context, format!("malformed relation: {line}")))?;
        let close = line
            .rfind(')')
            .ok_or_else(|| CoreError::parse(&context, format!("malformed relation: {line}")))?;
        let label = normalize_relation_label(&line[..open]);
        let args: Vec<&str> = line[open + 1..close].split(',').map(str::trim).collect();
        if args.len() < 2 || args.len() > 3 {
            return Err(CoreError::parse(
                &context,
                format!("expected 2 or 3 arguments: {line}"),
            ));
        }
        let reverse = args.len() == 3 && args[2].eq_ignore_ascii_case("REVERSE");
        if args.len() == 3 && !reverse {
            return Err(CoreError::parse(
                &context,
                format!("unknown flag {}", args[2]),
            ));
        }
        let (head_id, tail_id) = if reverse {
            (args[1], args[0])
        } else {
            (args[0], args[1])
        };

        let di = *registry
            .get(head_id)
            .ok_or_else(|| CoreError::parse(&context, format!("unknown entity id {head_id}")))?;
        let dj = *registry
            .get(tail_id)
            .ok_or_else(|| CoreError::parse(&context, format!("unknown entity id {tail_id}")))?;
        if di != dj {
            return Err(CoreError::parse(
                &context,
                format!("endpoints {head_id}, {tail_id} belong to different documents"),
            ));
        }
        let draft = &mut drafts[di];
        let (hs, _) = draft.entity_positions[head_id];
        let (ts, _) = draft.entity_positions[tail_id];
        if hs != ts {
            report.dropped_relations += 1;
            report.warnings.push(format!(
                "{}: dropped cross-sentence relation {label}({head_id},{tail_id})",
                draft.doc_id
            ));
            continue;
        }
        draft.sentences[hs].relations.push(RelationMention {
            head: head_id.to_string(),
            tail: tail_id.to_string(),
            relation_type: label,
            perspective: Perspective::Sem,
        });
    }

    let docs: Vec<Document> = drafts
        .into_iter()
        .map(|d| Document {
            doc_id: d.doc_id,
            source: Source::Semeval,
            raw_text: d.raw_text,
            sentences: d.sentences,
        })
        .collect();

    report.documents = docs.len();
    report.entities = docs.iter().map(Document::entity_count).sum();
    report.relations = docs.iter().map(Document::relation_count).sum();
    Ok((docs, report))
}
