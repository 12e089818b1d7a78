//! Cross-perspective alignment: overlap detection, entity matching and
//! agreement verdicts.
//!
//! Overlapping abstracts are paired by normalized-text equality. For each
//! pair, the SemEval annotations are re-projected onto the SciERC sentence
//! and token grid through character offsets, so spans from both perspectives
//! live on one token grid and can be compared directly.

mod stats;

pub use stats::{overlap_statistics, CooccurrenceTable, OverlapReport, RelationDistribution};

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{Document, EntityMention, Perspective, RelationMention, Sentence, Span};
use crate::error::CoreError;
use crate::labels::{map_relation_label, MappingDirection};
use crate::softlabel::Agreement;

/// Aligned pairs plus the leftover documents of each corpus.
pub type OverlapPartition = (Vec<AlignedDocument>, Vec<Document>, Vec<Document>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchKind {
    /// Identical token span in the aligned sentence.
    Exact,
    /// Spans overlap but differ in at least one boundary.
    Partial,
}

/// A matched entity pair across perspectives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityMatch {
    pub sentence: usize,
    pub sem_id: String,
    pub sci_id: String,
    pub kind: MatchKind,
}

/// One relation of either perspective together with its agreement level.
/// High and low verdicts carry both relations; medium carries exactly one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationVerdict {
    pub sentence: usize,
    pub sci_relation: Option<RelationMention>,
    pub sem_relation: Option<RelationMention>,
    pub agreement: Agreement,
}

/// A pair of perspective annotations over one abstract. After construction
/// both documents share the same sentence/token grid, so
/// `sentence_alignment` is the identity pairing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedDocument {
    pub sem_doc: Document,
    pub sci_doc: Document,
    pub sentence_alignment: Vec<(usize, usize)>,
    pub entity_matches: Vec<EntityMatch>,
    pub relation_verdicts: Vec<RelationVerdict>,
}

/// Lowercase and strip everything but letters and digits. Collapsing to the
/// alphanumeric skeleton makes overlap detection immune to whitespace,
/// tokenization and punctuation variants.
pub fn normalize_text(text: &str) -> String {
    text.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(|c| c.to_lowercase())
        .collect()
}

/// Pair documents across corpora by normalized-text equality. As a
/// secondary deterministic rule, a document whose normalized text ends with
/// the other side's normalized text also pairs (one release may keep the
/// paper title, the other may not). The three returned lists partition both
/// corpora: aligned pairs, SemEval-only documents, SciERC-only documents.
pub fn find_overlaps(
    sem_corpus: &[Document],
    sci_corpus: &[Document],
) -> Result<OverlapPartition, CoreError> {
    let mut sci_by_norm: HashMap<String, Vec<usize>> = HashMap::new();
    for (i, doc) in sci_corpus.iter().enumerate() {
        sci_by_norm
            .entry(normalize_text(&doc.raw_text))
            .or_default()
            .push(i);
    }
    for (norm, idxs) in &sci_by_norm {
        if idxs.len() > 1 && !norm.is_empty() {
            return Err(CoreError::AmbiguousOverlap {
                doc_id: sci_corpus[idxs[0]].doc_id.clone(),
                candidates: idxs.iter().map(|&i| sci_corpus[i].doc_id.clone()).collect(),
            });
        }
    }
    let mut sem_seen: HashMap<String, usize> = HashMap::new();
    for (i, doc) in sem_corpus.iter().enumerate() {
        let norm = normalize_text(&doc.raw_text);
        if let Some(&prev) = sem_seen.get(&norm) {
            if sci_by_norm.contains_key(&norm) {
                return Err(CoreError::AmbiguousOverlap {
                    doc_id: sci_corpus[sci_by_norm[&norm][0]].doc_id.clone(),
                    candidates: vec![sem_corpus[prev].doc_id.clone(), doc.doc_id.clone()],
                });
            }
        }
        sem_seen.insert(norm, i);
    }

    let mut aligned = Vec::new();
    let mut sem_unmatched: Vec<usize> = Vec::new();
    let mut sci_matched: HashSet<usize> = HashSet::new();

    for (si, sem_doc) in sem_corpus.iter().enumerate() {
        let norm = normalize_text(&sem_doc.raw_text);
        match sci_by_norm.get(&norm) {
            Some(idxs) => {
                let sci_doc = &sci_corpus[idxs[0]];
                sci_matched.insert(idxs[0]);
                aligned.push(pair_documents(sem_doc, sci_doc)?);
            }
            None => sem_unmatched.push(si),
        }
    }

    // Suffix pass over the leftovers.
    let mut sem_only = Vec::new();
    for si in sem_unmatched {
        let sem_doc = &sem_corpus[si];
        let sem_norm = normalize_text(&sem_doc.raw_text);
        let mut candidates: Vec<usize> = sci_corpus
            .iter()
            .enumerate()
            .filter(|(i, sci_doc)| {
                if sci_matched.contains(i) || sem_norm.is_empty() {
                    return false;
                }
                let sci_norm = normalize_text(&sci_doc.raw_text);
                !sci_norm.is_empty()
                    && (sem_norm.ends_with(&sci_norm) || sci_norm.ends_with(&sem_norm))
            })
            .map(|(i, _)| i)
            .collect();
        match candidates.len() {
            0 => sem_only.push(sem_doc.clone()),
            1 => {
                let i = candidates.pop().expect("one candidate");
                sci_matched.insert(i);
                aligned.push(pair_documents(sem_doc, &sci_corpus[i])?);
            }
            _ => {
                return Err(CoreError::AmbiguousOverlap {
                    doc_id: sem_doc.doc_id.clone(),
                    candidates: candidates
                        .into_iter()
                        .map(|i| sci_corpus[i].doc_id.clone())
                        .collect(),
                })
            }
        }
    }
    let sci_only = sci_corpus
        .iter()
        .enumerate()
        .filter(|(i, _)| !sci_matched.contains(i))
        .map(|(_, d)| d.clone())
        .collect();

    Ok((aligned, sem_only, sci_only))
}

/// Build an aligned pair: re-project the SemEval annotations onto the SciERC
/// grid, then leave matches and verdicts for [`align_entities`] and
/// [`assign_agreements`].
pub fn pair_documents(
    sem_doc: &Document,
    sci_doc: &Document,
) -> Result<AlignedDocument, CoreError> {
    let sem_on_grid = reproject(sem_doc, sci_doc)?;
    let n = sci_doc.sentences.len();
    Ok(AlignedDocument {
        sem_doc: sem_on_grid,
        sci_doc: sci_doc.clone(),
        sentence_alignment: (0..n).map(|i| (i, i)).collect(),
        entity_matches: Vec::new(),
        relation_verdicts: Vec::new(),
    })
}

/// Map from normalized-character index to original character index.
fn norm_positions(text: &str) -> Vec<usize> {
    let mut positions = Vec::new();
    for (i, c) in text.chars().enumerate() {
        if c.is_alphanumeric() {
            // One entry per lowercased character so multi-char lowercase
            // expansions keep the two sides in step.
            for _ in c.to_lowercase() {
                positions.push(i);
            }
        }
    }
    positions
}

/// Re-tokenize a SemEval document to the SciERC token grid via character
/// offsets. Boundaries that fall inside a SciERC token widen to the covering
/// tokens (character-overlap fallback). When one normalized text is a
/// proper suffix of the other (a title kept on one side only), alignment
/// anchors at the common suffix; annotations on the extra prefix cannot be
/// placed and drop.
fn reproject(sem_doc: &Document, sci_doc: &Document) -> Result<Document, CoreError> {
    let sem_pos = norm_positions(&sem_doc.raw_text);
    let sci_pos = norm_positions(&sci_doc.raw_text);
    let sem_norm = normalize_text(&sem_doc.raw_text);
    let sci_norm = normalize_text(&sci_doc.raw_text);
    // Offset of the shared suffix inside each side's normalized text.
    let (sem_skip, sci_skip) = if sem_pos.len() == sci_pos.len() && sem_norm == sci_norm {
        (0usize, 0usize)
    } else if sem_norm.ends_with(&sci_norm) {
        (sem_pos.len() - sci_pos.len(), 0)
    } else if sci_norm.ends_with(&sem_norm) {
        (0, sci_pos.len() - sem_pos.len())
    } else {
        return Err(CoreError::InvalidInput(format!(
            "cannot align {} with {}: normalized texts differ",
            sem_doc.doc_id, sci_doc.doc_id,
        )));
    };
    let sem_pos = &sem_pos[sem_skip..];
    let sci_pos = &sci_pos[sci_skip..];
    // Normalized index of the first normalized char at or after a given
    // original char offset.
    let norm_index_at = |positions: &[usize], char_offset: usize| -> usize {
        positions.partition_point(|&p| p < char_offset)
    };

    let mut sentences: Vec<Sentence> = sci_doc
        .sentences
        .iter()
        .map(|s| Sentence {
            tokens: s.tokens.clone(),
            entities: Vec::new(),
            relations: Vec::new(),
        })
        .collect();

    // Locate a sci char range -> (sentence, token span).
    let locate = |char_start: usize, char_end: usize| -> Option<(usize, Span)> {
        for (si, sent) in sci_doc.sentences.iter().enumerate() {
            let Some(first_tok) = sent.tokens.first() else {
                continue;
            };
            let Some(last_tok) = sent.tokens.last() else {
                continue;
            };
            if char_start >= first_tok.char_start && char_start < last_tok.char_end {
                let mut first = None;
                let mut last = None;
                for tok in &sent.tokens {
                    if tok.char_end > char_start && tok.char_start < char_end {
                        if first.is_none() {
                            first = Some(tok.index);
                        }
                        last = Some(tok.index);
                    }
                }
                return match (first, last) {
                    (Some(f), Some(l)) => Some((si, Span::new(f, l + 1))),
                    _ => None,
                };
            }
        }
        None
    };

    // entity id -> (sentence, span) on the sci grid
    let mut placed: HashMap<String, (usize, Span)> = HashMap::new();
    for sent in &sem_doc.sentences {
        for entity in &sent.entities {
            let (Some(tok_first), Some(tok_last)) = (
                sent.tokens.get(entity.span.start),
                sent.tokens.get(entity.span.end.saturating_sub(1)),
            ) else {
                continue;
            };
            let ns = norm_index_at(sem_pos, tok_first.char_start);
            let ne = norm_index_at(sem_pos, tok_last.char_end);
            if ns >= ne || ne > sci_pos.len() {
                continue;
            }
            let sci_start = sci_pos[ns];
            let sci_end = sci_pos[ne - 1] + 1;
            if let Some((si, span)) = locate(sci_start, sci_end) {
                sentences[si].entities.push(EntityMention {
                    id: entity.id.clone(),
                    span,
                    entity_type: entity.entity_type.clone(),
                    perspective: Perspective::Sem,
                });
                placed.insert(entity.id.clone(), (si, span));
            }
        }
    }

    for sent in &sem_doc.sentences {
        for rel in &sent.relations {
            let (Some(&(hs, _)), Some(&(ts, _))) = (placed.get(&rel.head), placed.get(&rel.tail))
            else {
                continue;
            };
            if hs != ts {
                // Re-projection moved the endpoints into different sci
                // sentences; the within-sentence invariant wins.
                continue;
            }
            sentences[hs].relations.push(rel.clone());
        }
    }

    Ok(Document {
        doc_id: sem_doc.doc_id.clone(),
        source: sem_doc.source,
        raw_text: sci_doc.raw_text.clone(),
        sentences,
    })
}

/// Match entities across perspectives, sentence by sentence: greedy
/// highest-overlap, ties broken by leftmost-then-shortest; each entity joins
/// at most one match. Exact means identical token span.
pub fn align_entities(mut pair: AlignedDocument) -> AlignedDocument {
    let mut matches = Vec::new();
    for &(si_sem, si_sci) in &pair.sentence_alignment {
        let sem_sent = &pair.sem_doc.sentences[si_sem];
        let sci_sent = &pair.sci_doc.sentences[si_sci];

        let mut candidates: Vec<(usize, &EntityMention, &EntityMention)> = Vec::new();
        for sem_e in &sem_sent.entities {
            for sci_e in &sci_sent.entities {
                let ov = sem_e.span.overlap(&sci_e.span);
                if ov > 0 {
                    candidates.push((ov, sem_e, sci_e));
                }
            }
        }
        candidates.sort_by(|a, b| {
            b.0.cmp(&a.0)
                .then(a.1.span.start.cmp(&b.1.span.start))
                .then(a.1.span.width().cmp(&b.1.span.width()))
                .then(a.2.span.start.cmp(&b.2.span.start))
                .then(a.2.span.width().cmp(&b.2.span.width()))
                .then(a.1.id.cmp(&b.1.id))
                .then(a.2.id.cmp(&b.2.id))
        });

        let mut sem_taken: HashSet<&str> = HashSet::new();
        let mut sci_taken: HashSet<&str> = HashSet::new();
        for (_, sem_e, sci_e) in candidates {
            if sem_taken.contains(sem_e.id.as_str()) || sci_taken.contains(sci_e.id.as_str()) {
                continue;
            }
            sem_taken.insert(&sem_e.id);
            sci_taken.insert(&sci_e.id);
            matches.push(EntityMatch {
                sentence: si_sci,
                sem_id: sem_e.id.clone(),
                sci_id: sci_e.id.clone(),
                kind: if sem_e.span == sci_e.span {
                    MatchKind::Exact
                } else {
                    MatchKind::Partial
                },
            });
        }
    }
    pair.entity_matches = matches;
    pair
}

/// Assign one agreement verdict to every relation of both perspectives.
///
/// Pairing runs in two passes over each sentence so the outcome is symmetric
/// in the perspectives: consistent pairs first (high), then conflicting
/// pairs over the same exact-matched ordered entity pair (low); everything
/// left is single-perspective (medium).
pub fn assign_agreements(mut pair: AlignedDocument) -> AlignedDocument {
    let mut verdicts = Vec::new();

    for &(si_sem, si_sci) in &pair.sentence_alignment {
        let sem_sent = &pair.sem_doc.sentences[si_sem];
        let sci_sent = &pair.sci_doc.sentences[si_sci];

        // Exact-match translation sem id -> sci id for this sentence.
        let exact: BTreeMap<&str, &str> = pair
            .entity_matches
            .iter()
            .filter(|m| m.sentence == si_sci && m.kind == MatchKind::Exact)
            .map(|m| (m.sem_id.as_str(), m.sci_id.as_str()))
            .collect();

        // Sem relation -> its sci-space ordered endpoint pair, when both
        // endpoints are exact-matched.
        let sem_pairs: Vec<Option<(String, String)>> = sem_sent
            .relations
            .iter()
            .map(|r| {
                let h = exact.get(r.head.as_str())?;
                let t = exact.get(r.tail.as_str())?;
                Some((h.to_string(), t.to_string()))
            })
            .collect();

        let mut sem_used = vec![false; sem_sent.relations.len()];
        let mut sci_used = vec![false; sci_sent.relations.len()];

        // Pass 1: consistent labels over the same ordered pair.
        for (ri, sci_rel) in sci_sent.relations.iter().enumerate() {
            let target = (sci_rel.head.clone(), sci_rel.tail.clone());
            let partner = (0..sem_sent.relations.len()).find(|&rj| {
                !sem_used[rj]
                    && sem_pairs[rj].as_ref() == Some(&target)
                    && map_relation_label(
                        &sem_sent.relations[rj].relation_type,
                        MappingDirection::SemToSci,
                    ) == Some(sci_rel.relation_type.as_str())
            });
            if let Some(rj) = partner {
                sem_used[rj] = true;
                sci_used[ri] = true;
                verdicts.push(RelationVerdict {
                    sentence: si_sci,
                    sci_relation: Some(sci_rel.clone()),
                    sem_relation: Some(sem_sent.relations[rj].clone()),
                    agreement: Agreement::High,
                });
            }
        }

        // Pass 2: same ordered pair, conflicting labels.
        for (ri, sci_rel) in sci_sent.relations.iter().enumerate() {
            if sci_used[ri] {
                continue;
            }
            let target = (sci_rel.head.clone(), sci_rel.tail.clone());
            let partner = (0..sem_sent.relations.len())
                .find(|&rj| !sem_used[rj] && sem_pairs[rj].as_ref() == Some(&target));
            if let Some(rj) = partner {
                sem_used[rj] = true;
                sci_used[ri] = true;
                verdicts.push(RelationVerdict {
                    sentence: si_sci,
                    sci_relation: Some(sci_rel.clone()),
                    sem_relation: Some(sem_sent.relations[rj].clone()),
                    agreement: Agreement::Low,
                });
            }
        }

        // Pass 3: relations present in one perspective only.
        for (ri, sci_rel) in sci_sent.relations.iter().enumerate() {
            if !sci_used[ri] {
                verdicts.push(RelationVerdict {
                    sentence: si_sci,
                    sci_relation: Some(sci_rel.clone()),
                    sem_relation: None,
                    agreement: Agreement::Medium,
                });
            }
        }
        for (rj, sem_rel) in sem_sent.relations.iter().enumerate() {
            if !sem_used[rj] {
                verdicts.push(RelationVerdict {
                    sentence: si_sci,
                    sci_relation: None,
                    sem_relation: Some(sem_rel.clone()),
                    agreement: Agreement::Medium,
                });
            }
        }
    }

    pair.relation_verdicts = verdicts;
    pair
}

/// Full alignment pipeline over two corpora.
pub fn align_all(
    sem_corpus: &[Document],
    sci_corpus: &[Document],
) -> Result<OverlapPartition, CoreError> {
    let (aligned, sem_only, sci_only) = find_overlaps(sem_corpus, sci_corpus)?;
    let aligned = aligned
        .into_iter()
        .map(|p| assign_agreements(align_entities(p)))
        .collect();
    Ok((aligned, sem_only, sci_only))
}

impl AlignedDocument {
    /// Agreement level of a specific relation, keyed by sentence,
    /// perspective and relation identity.
    pub fn agreement_of(&self, sentence: usize, rel: &RelationMention) -> Option<Agreement> {
        self.relation_verdicts.iter().find_map(|v| {
            if v.sentence != sentence {
                return None;
            }
            let side = match rel.perspective {
                Perspective::Sci => v.sci_relation.as_ref(),
                Perspective::Sem => v.sem_relation.as_ref(),
            };
            match side {
                Some(r) if r == rel => Some(v.agreement),
                _ => None,
            }
        })
    }

    /// Exact-matched sci entity id for a sem entity, if any.
    pub fn exact_sci_partner(&self, sentence: usize, sem_id: &str) -> Option<&str> {
        self.entity_matches.iter().find_map(|m| {
            (m.sentence == sentence && m.kind == MatchKind::Exact && m.sem_id == sem_id)
                .then_some(m.sci_id.as_str())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn disjoint_corpora_do_not_align() {
        let (sem, _) = fixtures::table2_corpora();
        let other = fixtures::synthetic_corpora(&fixtures::SyntheticSpec {
            n_overlap: 0,
            n_sem_only: 0,
            n_sci_only: 2,
            seed: 9,
        });
        let (aligned, sem_only, sci_only) = find_overlaps(&sem, &other.1).unwrap();
        assert!(aligned.is_empty());
        assert_eq!(sem_only.len(), sem.len());
        assert_eq!(sci_only.len(), 2);
    }

    #[test]
    fn whitespace_variants_still_align() {
        let (sem, sci) = fixtures::table2_corpora();
        let mut sem_ws = sem.clone();
        sem_ws[0].raw_text = sem_ws[0].raw_text.replace(' ', "  ");
        let (aligned, _, _) = find_overlaps(&sem_ws, &sci).unwrap();
        assert_eq!(aligned.len(), sem.len());
    }

    #[test]
    fn ambiguous_normalized_text_is_an_error() {
        let (sem, sci) = fixtures::table2_corpora();
        let mut sci_dup = sci.clone();
        let mut clone = sci_dup[0].clone();
        clone.doc_id = "dup".into();
        sci_dup.push(clone);
        let err = find_overlaps(&sem, &sci_dup).unwrap_err();
        assert!(matches!(err, CoreError::AmbiguousOverlap { .. }));
    }

    #[test]
    fn title_kept_on_one_side_still_aligns() {
        use crate::corpus::Source;
        use crate::fixtures::{build_document, SentenceSpec};

        // The sem release keeps a title line; the sci release starts at the
        // abstract. The shared suffix anchors the alignment.
        let sem = build_document(
            "t1",
            Source::Semeval,
            Perspective::Sem,
            &[
                SentenceSpec::new(&["A", "title", "line"], &[], &[]),
                SentenceSpec::new(&["the", "parser", "works", "."], &[(1, 2, "ENTITY")], &[]),
            ],
        );
        let sci = build_document(
            "t1",
            Source::Scierc,
            Perspective::Sci,
            &[SentenceSpec::new(
                &["the", "parser", "works", "."],
                &[(1, 2, "Method")],
                &[],
            )],
        );
        let (aligned, sem_only, sci_only) = find_overlaps(&[sem], &[sci]).unwrap();
        assert_eq!(aligned.len(), 1);
        assert!(sem_only.is_empty() && sci_only.is_empty());
        let pair = align_entities(aligned.into_iter().next().unwrap());
        assert_eq!(pair.entity_matches.len(), 1);
        assert_eq!(pair.entity_matches[0].kind, MatchKind::Exact);
        let sem_ent = pair.sem_doc.sentences[0].entities[0].span;
        assert_eq!(sem_ent, Span::new(1, 2));
    }

    #[test]
    fn exact_and_partial_matches() {
        let (sem, sci) = fixtures::table2_corpora();
        let (aligned, _, _) = find_overlaps(&sem, &sci).unwrap();
        // Example 1: both entities exactly shared.
        let ex1 = align_entities(aligned.into_iter().next().unwrap());
        assert_eq!(ex1.entity_matches.len(), 2);
        assert!(ex1
            .entity_matches
            .iter()
            .all(|m| m.kind == MatchKind::Exact));
    }

    #[test]
    fn partial_match_prefers_highest_overlap() {
        let (sem, sci) = fixtures::table2_corpora();
        let (aligned, _, _) = find_overlaps(&sem, &sci).unwrap();
        // Example 3: sem [4,9) against sci [4,5) and [6,9): overlap 3 beats 1.
        let ex3 = align_entities(aligned.into_iter().nth(2).unwrap());
        assert_eq!(ex3.entity_matches.len(), 1);
        let m = &ex3.entity_matches[0];
        assert_eq!(m.kind, MatchKind::Partial);
        let sci_span = ex3.sci_doc.sentences[0].entity(&m.sci_id).unwrap().span;
        assert_eq!(sci_span, Span::new(6, 9));
    }

    #[test]
    fn zero_overlap_is_no_match() {
        assert_eq!(Span::new(1, 2).overlap(&Span::new(5, 6)), 0);
    }

    #[test]
    fn overlapping_but_unequal_spans_match_partially() {
        use crate::corpus::Source;
        use crate::fixtures::{build_document, SentenceSpec};

        let tokens = &["a", "b", "c", "d", "e", "f", "g", "h", "i", "j"][..];
        let sem = build_document(
            "p1",
            Source::Semeval,
            Perspective::Sem,
            &[SentenceSpec::new(tokens, &[(4, 9, "ENTITY")], &[])],
        );
        let sci = build_document(
            "p1",
            Source::Scierc,
            Perspective::Sci,
            &[SentenceSpec::new(tokens, &[(4, 5, "Method")], &[])],
        );
        let (aligned, _, _) = find_overlaps(&[sem], &[sci]).unwrap();
        let pair = align_entities(aligned.into_iter().next().unwrap());
        assert_eq!(pair.entity_matches.len(), 1);
        assert_eq!(pair.entity_matches[0].kind, MatchKind::Partial);
    }

    #[test]
    fn table2_verdicts() {
        let aligned = fixtures::table2_aligned();
        let levels: Vec<Vec<Agreement>> = aligned
            .iter()
            .map(|p| p.relation_verdicts.iter().map(|v| v.agreement).collect())
            .collect();
        assert_eq!(levels[0], vec![Agreement::High]);
        assert_eq!(levels[1], vec![Agreement::Low]);
        assert_eq!(levels[2], vec![Agreement::Medium]);
        assert_eq!(levels[3], vec![Agreement::Medium, Agreement::Medium]);
    }

    #[test]
    fn verdicts_are_exhaustive_and_symmetric() {
        let aligned = fixtures::table2_aligned();
        for pair in &aligned {
            let total_rel: usize = pair
                .sci_doc
                .sentences
                .iter()
                .chain(pair.sem_doc.sentences.iter())
                .map(|s| s.relations.len())
                .sum();
            let verdict_rel: usize = pair
                .relation_verdicts
                .iter()
                .map(|v| v.sci_relation.is_some() as usize + v.sem_relation.is_some() as usize)
                .sum();
            assert_eq!(total_rel, verdict_rel);

            // Swap the perspectives and compare verdict level multisets.
            let mut swapped_labels: Vec<_> = swap_and_assign(pair)
                .relation_verdicts
                .iter()
                .map(|v| v.agreement)
                .collect();
            let mut labels: Vec<_> = pair.relation_verdicts.iter().map(|v| v.agreement).collect();
            swapped_labels.sort_by_key(|a| *a as u8);
            labels.sort_by_key(|a| *a as u8);
            assert_eq!(labels, swapped_labels);
        }
    }

    /// Re-run agreement assignment with sci and sem swapped (labels mapped
    /// into the opposite naming so the mapping still applies).
    fn swap_and_assign(pair: &AlignedDocument) -> AlignedDocument {
        let flip = |doc: &Document, to: Perspective| {
            let mut doc = doc.clone();
            for sent in &mut doc.sentences {
                for e in &mut sent.entities {
                    e.perspective = to;
                }
                for r in &mut sent.relations {
                    r.perspective = to;
                    let dir = match to {
                        Perspective::Sci => MappingDirection::SemToSci,
                        Perspective::Sem => MappingDirection::SciToSem,
                    };
                    if let Some(mapped) = map_relation_label(&r.relation_type, dir) {
                        r.relation_type = mapped.to_string();
                    }
                }
            }
            doc
        };
        let swapped = AlignedDocument {
            sem_doc: flip(&pair.sci_doc, Perspective::Sem),
            sci_doc: flip(&pair.sem_doc, Perspective::Sci),
            sentence_alignment: pair.sentence_alignment.clone(),
            entity_matches: Vec::new(),
            relation_verdicts: Vec::new(),
        };
        assign_agreements(align_entities(swapped))
    }
}
