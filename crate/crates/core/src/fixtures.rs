//! Synthetic corpora for unit tests, the acceptance suite and desk-scale
//! smoke runs.
//!
//! [`table2_corpora`] encodes the four canonical disagreement patterns
//! between the two annotation perspectives: an overlapped relation, a
//! conflicted relation, a conflicted entity boundary, and disjoint
//! entity/relation choices. [`synthetic_corpora`] produces seeded random
//! corpora with controllable overlap for end-to-end runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::align::{align_all, AlignedDocument};
use crate::builder::SciercPartition;
use crate::corpus::{
    Document, EntityMention, Perspective, RelationMention, Sentence, Source, Span, Token,
};

/// Declarative sentence: token texts, entity spans with types, relations as
/// (head entity index, tail entity index, label).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceSpec {
    pub tokens: Vec<String>,
    pub entities: Vec<(usize, usize, String)>,
    pub relations: Vec<(usize, usize, String)>,
}

impl SentenceSpec {
    pub fn new(
        tokens: &[&str],
        entities: &[(usize, usize, &str)],
        relations: &[(usize, usize, &str)],
    ) -> Self {
        SentenceSpec {
            tokens: tokens.iter().map(|s| s.to_string()).collect(),
            entities: entities
                .iter()
                .map(|&(s, e, t)| (s, e, t.to_string()))
                .collect(),
            relations: relations
                .iter()
                .map(|&(h, t, l)| (h, t, l.to_string()))
                .collect(),
        }
    }
}

/// Build a document from sentence specs. Entity ids are generated as
/// `{m|s}{sentence}e{index}` depending on perspective, raw text is the
/// space-joined token sequence.
pub fn build_document(
    doc_id: &str,
    source: Source,
    perspective: Perspective,
    specs: &[SentenceSpec],
) -> Document {
    let prefix = match perspective {
        Perspective::Sem => "m",
        Perspective::Sci => "s",
    };
    let mut raw_text = String::new();
    let mut char_pos = 0usize;
    let mut sentences = Vec::with_capacity(specs.len());

    for (si, spec) in specs.iter().enumerate() {
        let mut tokens = Vec::with_capacity(spec.tokens.len());
        for (ti, text) in spec.tokens.iter().enumerate() {
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
        let entities: Vec<EntityMention> = spec
            .entities
            .iter()
            .enumerate()
            .map(|(k, (s, e, ty))| EntityMention {
                id: format!("{prefix}{si}e{k}"),
                span: Span::new(*s, *e),
                entity_type: ty.clone(),
                perspective,
            })
            .collect();
        let relations = spec
            .relations
            .iter()
            .map(|(h, t, label)| RelationMention {
                head: entities[*h].id.clone(),
                tail: entities[*t].id.clone(),
                relation_type: label.clone(),
                perspective,
            })
            .collect();
        sentences.push(Sentence {
            tokens,
            entities,
            relations,
        });
    }

    Document {
        doc_id: doc_id.to_string(),
        source,
        raw_text,
        sentences,
    }
}

/// The four canonical disagreement fixtures as two single-abstract corpora
/// over identical texts. Returns (sem corpus, sci corpus).
pub fn table2_corpora() -> (Vec<Document>, Vec<Document>) {
    // 1: both perspectives annotate the same pair with mapped labels.
    let ex1_tokens = &[
        "The",
        "system",
        "is",
        "based",
        "on",
        "a",
        "multi-component",
        "architecture",
        ".",
    ][..];
    let sem1 = SentenceSpec::new(
        ex1_tokens,
        &[(1, 2, "ENTITY"), (6, 8, "ENTITY")],
        &[(1, 0, "Usage")],
    );
    let sci1 = SentenceSpec::new(
        ex1_tokens,
        &[(1, 2, "Generic"), (6, 8, "Method")],
        &[(1, 0, "Used-for")],
    );

    // 2: same pair, conflicting labels (Model maps to Feature-of, not
    // Used-for).
    let ex2_tokens = &[
        "semantics",
        "represented",
        "in",
        "a",
        "logical",
        "form",
        "language",
        ".",
    ][..];
    let sem2 = SentenceSpec::new(
        ex2_tokens,
        &[(0, 1, "ENTITY"), (4, 7, "ENTITY")],
        &[(1, 0, "Model")],
    );
    let sci2 = SentenceSpec::new(
        ex2_tokens,
        &[(0, 1, "OtherScientificTerm"), (4, 7, "Method")],
        &[(1, 0, "Used-for")],
    );

    // 3: conflicted entity boundaries; the relation exists in one
    // perspective only.
    let ex3_tokens = &[
        "This",
        "paper",
        "introduces",
        "a",
        "system",
        "for",
        "categorizing",
        "unknown",
        "words",
        ".",
    ][..];
    let sem3 = SentenceSpec::new(ex3_tokens, &[(4, 9, "ENTITY")], &[]);
    let sci3 = SentenceSpec::new(
        ex3_tokens,
        &[(4, 5, "Generic"), (6, 9, "Task")],
        &[(1, 0, "Used-for")],
    );

    // 4: different entities and different relations entirely.
    let ex4_tokens = &[
        "We",
        "propose",
        "a",
        "detection",
        "method",
        "for",
        "orthographic",
        "variants",
        "caused",
        "by",
        "transliteration",
        "in",
        "a",
        "large",
        "corpus",
        ".",
    ][..];
    let sem4 = SentenceSpec::new(
        ex4_tokens,
        &[(3, 5, "ENTITY"), (10, 11, "ENTITY"), (14, 15, "ENTITY")],
        &[(1, 2, "Part-whole")],
    );
    let sci4 = SentenceSpec::new(
        ex4_tokens,
        &[
            (3, 5, "Method"),
            (6, 8, "OtherScientificTerm"),
            (10, 11, "OtherScientificTerm"),
        ],
        &[(1, 0, "Used-for")],
    );

    let sem = vec![
        build_document("ex1", Source::Semeval, Perspective::Sem, &[sem1]),
        build_document("ex2", Source::Semeval, Perspective::Sem, &[sem2]),
        build_document("ex3", Source::Semeval, Perspective::Sem, &[sem3]),
        build_document("ex4", Source::Semeval, Perspective::Sem, &[sem4]),
    ];
    let sci = vec![
        build_document("ex1", Source::Scierc, Perspective::Sci, &[sci1]),
        build_document("ex2", Source::Scierc, Perspective::Sci, &[sci2]),
        build_document("ex3", Source::Scierc, Perspective::Sci, &[sci3]),
        build_document("ex4", Source::Scierc, Perspective::Sci, &[sci4]),
    ];
    (sem, sci)
}

/// [`table2_corpora`] run through the full alignment pipeline.
pub fn table2_aligned() -> Vec<AlignedDocument> {
    let (sem, sci) = table2_corpora();
    let (aligned, sem_only, sci_only) = align_all(&sem, &sci).expect("fixture corpora align");
    assert!(sem_only.is_empty() && sci_only.is_empty());
    aligned
}

/// Five dual-annotated single-sentence abstracts, small enough to memorize:
/// the agreement mix covers high, low and medium verdicts.
pub fn overfit_corpora() -> (Vec<Document>, Vec<Document>) {
    let methods = ["parser", "tagger", "encoder", "kernel", "ranker"];
    let tools = ["treebank", "lexicon", "grammar", "corpus", "embedding"];
    let tasks = [
        "segmentation",
        "translation",
        "parsing",
        "retrieval",
        "summarization",
    ];

    let mut sem = Vec::new();
    let mut sci = Vec::new();
    for i in 0..5 {
        let tokens: Vec<&str> = vec![
            "the", methods[i], "applies", "the", tools[i], "for", tasks[i], ".",
        ];
        let sci_entities = [
            (1usize, 2usize, "Method"),
            (4, 5, "Material"),
            (6, 7, "Task"),
        ];
        let sem_entities = [
            (1usize, 2usize, "ENTITY"),
            (4, 5, "ENTITY"),
            (6, 7, "ENTITY"),
        ];

        // Relation mix: (tool -> task) agreed everywhere; (method, tool)
        // compared in even sentences with agreement, conflicted in sentence
        // 3, absent from sem in sentence 1.
        let mut sci_rels: Vec<(usize, usize, &str)> = vec![(1, 2, "Used-for")];
        let mut sem_rels: Vec<(usize, usize, &str)> = vec![(1, 2, "Usage")];
        match i {
            0 | 2 | 4 => {
                sci_rels.push((0, 1, "Compare"));
                sem_rels.push((0, 1, "Comparison"));
            }
            3 => {
                sci_rels.push((0, 1, "Compare"));
                sem_rels.push((0, 1, "Model"));
            }
            _ => {
                sci_rels.push((0, 1, "Feature-of"));
            }
        }

        let doc_id = format!("fit{i}");
        sem.push(build_document(
            &doc_id,
            Source::Semeval,
            Perspective::Sem,
            &[SentenceSpec::new(&tokens, &sem_entities, &sem_rels)],
        ));
        sci.push(build_document(
            &doc_id,
            Source::Scierc,
            Perspective::Sci,
            &[SentenceSpec::new(&tokens, &sci_entities, &sci_rels)],
        ));
    }
    (sem, sci)
}

/// [`overfit_corpora`] aligned.
pub fn overfit_aligned() -> Vec<AlignedDocument> {
    let (sem, sci) = overfit_corpora();
    let (aligned, _, _) = align_all(&sem, &sci).expect("overfit corpora align");
    aligned
}

/// Shape of a generated corpus pair.
pub struct SyntheticSpec {
    pub n_overlap: usize,
    pub n_sem_only: usize,
    pub n_sci_only: usize,
    pub seed: u64,
}

const METHOD_WORDS: [&str; 8] = [
    "parser",
    "tagger",
    "aligner",
    "encoder",
    "classifier",
    "segmenter",
    "ranker",
    "sampler",
];
const MATERIAL_WORDS: [&str; 6] = [
    "treebank",
    "corpus",
    "lexicon",
    "wordlist",
    "ontology",
    "embedding",
];
const TASK_WORDS: [&str; 6] = [
    "parsing",
    "tagging",
    "alignment",
    "retrieval",
    "translation",
    "summarization",
];

/// Seeded random corpus pair. Overlapping documents share their text
/// exactly; annotation disagreements (exact/partial boundaries, agreeing,
/// conflicting or one-sided relations) are drawn per sentence.
pub fn synthetic_corpora(spec: &SyntheticSpec) -> (Vec<Document>, Vec<Document>) {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut sem = Vec::new();
    let mut sci = Vec::new();

    for d in 0..spec.n_overlap {
        let (sem_doc, sci_doc) = synthetic_pair(&format!("ov{d}"), d, &mut rng);
        sem.push(sem_doc);
        sci.push(sci_doc);
    }
    for d in 0..spec.n_sem_only {
        let (sem_doc, _) = synthetic_pair(&format!("semx{d}"), spec.n_overlap + d, &mut rng);
        sem.push(sem_doc);
    }
    for d in 0..spec.n_sci_only {
        let (_, sci_doc) = synthetic_pair(
            &format!("scix{d}"),
            spec.n_overlap + spec.n_sem_only + d,
            &mut rng,
        );
        sci.push(sci_doc);
    }
    (sem, sci)
}

fn synthetic_pair(doc_id: &str, salt: usize, rng: &mut ChaCha8Rng) -> (Document, Document) {
    let n_sentences = rng.random_range(1..=3usize);
    let mut sem_specs = Vec::new();
    let mut sci_specs = Vec::new();

    for si in 0..n_sentences {
        let m = format!(
            "{}{salt}x{si}",
            METHOD_WORDS[rng.random_range(0..METHOD_WORDS.len())]
        );
        let mat = MATERIAL_WORDS[rng.random_range(0..MATERIAL_WORDS.len())].to_string();
        let t = TASK_WORDS[rng.random_range(0..TASK_WORDS.len())].to_string();
        let tokens: Vec<String> = vec![
            "the".into(),
            m,
            "uses".into(),
            "the".into(),
            mat,
            "to".into(),
            "solve".into(),
            t,
            ".".into(),
        ];

        let sci_entities = vec![
            (1usize, 2usize, "Method".to_string()),
            (4, 5, "Material".to_string()),
            (7, 8, "Task".to_string()),
        ];
        // Sem occasionally widens the second mention by one token.
        let widen = rng.random_bool(0.2);
        let sem_entities = vec![
            (1usize, 2usize, "ENTITY".to_string()),
            (if widen { 3 } else { 4 }, 5, "ENTITY".to_string()),
            (7, 8, "ENTITY".to_string()),
        ];

        let mut sci_rels = vec![(0usize, 2usize, "Used-for".to_string())];
        let mut sem_rels: Vec<(usize, usize, String)> = Vec::new();
        match rng.random_range(0..10u32) {
            0..=4 => sem_rels.push((0, 2, "Usage".to_string())), // agree
            5..=6 => sem_rels.push((0, 2, "Result".to_string())), // conflict
            _ => {}                                              // sci only
        }
        if rng.random_bool(0.4) {
            sci_rels.push((1, 0, "Part-of".to_string()));
        }
        if rng.random_bool(0.3) {
            sem_rels.push((1, 2, "Topic".to_string())); // unmapped, one-sided
        }

        sem_specs.push(SentenceSpec {
            tokens: tokens.clone(),
            entities: sem_entities,
            relations: sem_rels,
        });
        sci_specs.push(SentenceSpec {
            tokens,
            entities: sci_entities,
            relations: sci_rels,
        });
    }

    (
        build_document(doc_id, Source::Semeval, Perspective::Sem, &sem_specs),
        build_document(doc_id, Source::Scierc, Perspective::Sci, &sci_specs),
    )
}

/// Seeded SciREX-like abstracts carrying the four released entity types.
pub fn synthetic_scirex(n: usize, seed: u64) -> Vec<Document> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|d| {
            let m = format!(
                "{}rx{d}",
                METHOD_WORDS[rng.random_range(0..METHOD_WORDS.len())]
            );
            let t = TASK_WORDS[rng.random_range(0..TASK_WORDS.len())];
            let tokens: Vec<&str> = vec!["we", "evaluate", &m, "on", t, "."];
            let spec = SentenceSpec::new(&tokens, &[(2, 3, "Method"), (4, 5, "Task")], &[]);
            build_document(&format!("rx{d}"), Source::Scirex, Perspective::Sci, &[spec])
        })
        .collect()
}

/// Deterministic train/dev/test partition over a SciERC-style corpus.
pub fn synthetic_partition(sci: &[Document], test_fraction: f64, seed: u64) -> SciercPartition {
    let mut ids: Vec<String> = sci.iter().map(|d| d.doc_id.clone()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Fisher-Yates so the partition is stable for a given seed.
    for i in (1..ids.len()).rev() {
        let j = rng.random_range(0..=i);
        ids.swap(i, j);
    }
    let n_test = ((ids.len() as f64) * test_fraction).round() as usize;
    let test: Vec<String> = ids[..n_test].to_vec();
    let rest = &ids[n_test..];
    let n_dev = rest.len() / 8;
    SciercPartition {
        train: rest[n_dev..].to_vec(),
        dev: rest[..n_dev].to_vec(),
        test,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::validate_document;

    #[test]
    fn fixture_documents_are_well_formed() {
        let (sem, sci) = table2_corpora();
        for doc in sem.iter().chain(sci.iter()) {
            assert_eq!(
                validate_document(doc),
                Vec::<String>::new(),
                "{}",
                doc.doc_id
            );
        }
        let (sem, sci) = overfit_corpora();
        for doc in sem.iter().chain(sci.iter()) {
            assert_eq!(
                validate_document(doc),
                Vec::<String>::new(),
                "{}",
                doc.doc_id
            );
        }
    }

    #[test]
    fn synthetic_generation_is_deterministic() {
        let spec = SyntheticSpec {
            n_overlap: 4,
            n_sem_only: 2,
            n_sci_only: 3,
            seed: 11,
        };
        let (sem_a, sci_a) = synthetic_corpora(&spec);
        let (sem_b, sci_b) = synthetic_corpora(&spec);
        assert_eq!(sem_a, sem_b);
        assert_eq!(sci_a, sci_b);
        assert_eq!(sem_a.len(), 6);
        assert_eq!(sci_a.len(), 7);
        for doc in sem_a.iter().chain(sci_a.iter()) {
            assert_eq!(
                validate_document(doc),
                Vec::<String>::new(),
                "{}",
                doc.doc_id
            );
        }
    }

    #[test]
    fn synthetic_corpora_partition_cleanly() {
        let spec = SyntheticSpec {
            n_overlap: 5,
            n_sem_only: 3,
            n_sci_only: 2,
            seed: 3,
        };
        let (sem, sci) = synthetic_corpora(&spec);
        let (aligned, sem_only, sci_only) = align_all(&sem, &sci).unwrap();
        assert_eq!(aligned.len(), 5);
        assert_eq!(sem_only.len(), 3);
        assert_eq!(sci_only.len(), 2);
        assert_eq!(aligned.len() + sem_only.len(), sem.len());
        assert_eq!(aligned.len() + sci_only.len(), sci.len());
    }
}
