//! Checkpoints: an opaque little-endian f64 parameter blob plus a JSON
//! manifest carrying the head configuration, hyperparameters, encoder
//! identity (with vocabulary) and seed.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::encoder::{EncoderContract, Vocab};
use crate::error::ModelError;
use crate::spert::{JointModel, ModelConfig};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamShape {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub config: ModelConfig,
    pub encoder_id: String,
    pub encoder_dim: usize,
    pub vocab: Option<Vocab>,
    pub seed: u64,
    pub params: Vec<ParamShape>,
}

pub const MANIFEST_FILE: &str = "manifest.json";
pub const PARAMS_FILE: &str = "params.bin";

pub fn save(model: &JointModel, dir: &Path) -> Result<(), ModelError> {
    fs::create_dir_all(dir)?;
    let manifest = Manifest {
        config: model.config.clone(),
        encoder_id: model.encoder().identifier().to_string(),
        encoder_dim: model.encoder().dim(),
        vocab: match model.encoder() {
            crate::spert::AnyEncoder::Tiny(e) => Some(e.vocab().clone()),
            crate::spert::AnyEncoder::Frozen(_) => None,
        },
        seed: model.seed,
        params: model
            .params
            .specs
            .iter()
            .map(|s| ParamShape {
                name: s.name.clone(),
                rows: s.rows,
                cols: s.cols,
            })
            .collect(),
    };
    fs::write(
        dir.join(MANIFEST_FILE),
        serde_json::to_string_pretty(&manifest)?,
    )?;

    let mut blob = Vec::with_capacity(model.params.values.len() * 8);
    for v in &model.params.values {
        blob.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(dir.join(PARAMS_FILE), blob)?;
    Ok(())
}

pub fn load(dir: &Path) -> Result<JointModel, ModelError> {
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_FILE))?)?;
    let mut vocab = manifest.vocab.clone().ok_or_else(|| {
        ModelError::Checkpoint(format!(
            "cannot restore a {} encoder from a checkpoint; reload it from its vector file",
            manifest.encoder_id
        ))
    })?;
    vocab.reindex();

    let mut model = JointModel::with_tiny_encoder(manifest.config.clone(), vocab, manifest.seed);
    for (expected, actual) in manifest.params.iter().zip(&model.params.specs) {
        if expected.name != actual.name
            || expected.rows != actual.rows
            || expected.cols != actual.cols
        {
            return Err(ModelError::Checkpoint(format!(
                "parameter layout mismatch: manifest has {} ({}x{}), model has {} ({}x{})",
                expected.name, expected.rows, expected.cols, actual.name, actual.rows, actual.cols
            )));
        }
    }

    let blob = fs::read(dir.join(PARAMS_FILE))?;
    if blob.len() != model.params.values.len() * 8 {
        return Err(ModelError::Checkpoint(format!(
            "parameter blob holds {} bytes, expected {}",
            blob.len(),
            model.params.values.len() * 8
        )));
    }
    for (i, chunk) in blob.chunks_exact(8).enumerate() {
        model.params.values[i] = f64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
    }
    Ok(model)
}
