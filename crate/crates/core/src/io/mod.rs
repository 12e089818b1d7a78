//! Parsers for the three source releases and the unified interchange format.
//!
//! All parsers are pure functions of their input strings and safe to run
//! per-file in parallel. Each returns the parsed documents plus a
//! [`ParseReport`] so dropped cross-sentence relations are counted, never
//! silent.

mod scierc;
mod scirex;
mod segment;
mod semeval;
mod tokenize;
mod unified;

pub use scierc::parse_scierc;
pub use scirex::parse_scirex_abstracts;
pub use segment::{RuleSegmenter, Segmenter};
pub use semeval::parse_semeval;
pub use tokenize::tokenize;
pub use unified::{
    read_unified, write_unified, EntityRec, EntitySoftLabelRec, RelationRec, SentenceRec,
    SoftLabelRec, TokenRec, UnifiedRecord,
};

use serde::{Deserialize, Serialize};

use crate::corpus::Source;

/// Structured summary of one parse run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseReport {
    pub source: Source,
    pub documents: usize,
    pub entities: usize,
    pub relations: usize,
    /// Relations whose endpoints ended up in different sentences after
    /// segmentation; recorded and dropped.
    pub dropped_relations: usize,
    pub warnings: Vec<String>,
}

impl ParseReport {
    pub fn new(source: Source) -> Self {
        ParseReport {
            source,
            documents: 0,
            entities: 0,
            relations: 0,
            dropped_relations: 0,
            warnings: Vec::new(),
        }
    }

    pub fn relations_per_document(&self) -> f64 {
        if self.documents == 0 {
            0.0
        } else {
            self.relations as f64 / self.documents as f64
        }
    }
}
