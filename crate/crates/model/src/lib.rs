//! Span-based joint entity and relation extraction with two perspective
//! heads, a multi-perspective loss and a soft-label auxiliary loss.
//!
//! The model follows the span-classification recipe: enumerate candidate
//! spans up to a maximum width, classify each against the head's entity
//! types plus NONE, then classify ordered pairs of entity spans against the
//! head's relation types with independent per-class squashing. Both heads
//! share the encoder, the width embeddings and all span machinery; only the
//! classifier layers are per-perspective.
//!
//! Everything runs on a small hand-rolled reverse-mode autodiff
//! ([`autodiff`]) so analytic gradients are exact and checkable against
//! finite differences.

pub mod autodiff;
pub mod checkpoint;
pub mod encoder;
pub mod error;
pub mod loss;
pub mod predict;
pub mod sampling;
pub mod spert;
pub mod train;

pub use encoder::{EncoderContract, FrozenVectorEncoder, TinyEncoder, Vocab};
pub use error::ModelError;
pub use loss::LossValues;
pub use predict::{PredictedEntity, PredictedRelation, Prediction};
pub use sampling::{enumerate_spans, sample_negatives};
pub use spert::{
    prepare_batch, prepare_example, HeadSchema, JointModel, ModelConfig, PreparedExample,
};
pub use train::{train, train_model, EpochStats, TrainConfig, TrainOutcome};
