//! Core library for multi-perspective scientific information extraction.
//!
//! Two public corpora (SemEval-2018 Task 7 sub-task 2 and SciERC) annotate
//! many of the same paper abstracts with different schemes. This crate turns
//! that disagreement into a training signal:
//!
//! - [`corpus`] — the unified in-memory corpus model shared by everything else
//! - [`io`] — parsers for the SemEval / SciERC / SciREX releases and the
//!   line-delimited unified interchange format
//! - [`align`] — overlap detection, cross-perspective entity/relation
//!   alignment and agreement verdicts
//! - [`softlabel`] — agreement-graded probability distributions and the
//!   divergence functions used as auxiliary losses
//! - [`builder`] — materializes the training-set variants (independent,
//!   concat, mixed, multi-task) from aligned corpora
//! - [`eval`] — micro precision/recall/F1 scoring and seed averaging
//! - [`fixtures`] — synthetic corpora for tests and desk-scale smoke runs

pub mod align;
pub mod builder;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod io;
pub mod labels;
pub mod softlabel;

pub use corpus::{
    validate_document, Document, EntityMention, Perspective, RelationMention, Sentence, Source,
    Span, Token,
};
pub use error::CoreError;
pub use labels::{map_relation_label, LabelSchema, MappingDirection};
pub use softlabel::{Agreement, PredictionDistribution, SoftLabel};
