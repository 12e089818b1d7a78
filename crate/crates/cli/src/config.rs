//! Declarative experiment configuration with a deterministic hash.
//!
//! Configs are JSON files; CLI flags override individual fields. All
//! randomness flows from the per-seed values in `seeds`. The hash covers
//! everything that influences results (not the output directory), and every
//! run manifest and metrics file embeds it.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use sciie_core::builder::SplitSpec;
use sciie_core::softlabel::Divergence;
use sciie_model::{HeadSchema, ModelConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    OverlapTable3,
    DataQuantityFig2,
    LossAblationTable4,
    ScirexTable5,
    SciercStandardTable6,
    StatsReport,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::OverlapTable3 => "overlap_table3",
            Scenario::DataQuantityFig2 => "data_quantity_fig2",
            Scenario::LossAblationTable4 => "loss_ablation_table4",
            Scenario::ScirexTable5 => "scirex_table5",
            Scenario::SciercStandardTable6 => "scierc_standard_table6",
            Scenario::StatsReport => "stats_report",
        }
    }
}

/// Where the corpora live. Either native release files or pre-parsed
/// unified files; unified wins when both are given.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DataPaths {
    #[serde(default)]
    pub semeval_abstracts: Option<PathBuf>,
    #[serde(default)]
    pub semeval_relations: Option<PathBuf>,
    #[serde(default)]
    pub scierc_json: Option<PathBuf>,
    #[serde(default)]
    pub scirex_json: Option<PathBuf>,
    #[serde(default)]
    pub sem_unified: Option<PathBuf>,
    #[serde(default)]
    pub sci_unified: Option<PathBuf>,
    #[serde(default)]
    pub scirex_unified: Option<PathBuf>,
    #[serde(default)]
    pub scierc_partition: Option<PathBuf>,
}

impl DataPaths {
    /// Resolve relative paths against a data root (flag or
    /// SCIIE_DATA_ROOT).
    pub fn resolved(&self, root: Option<&Path>) -> DataPaths {
        let fix = |p: &Option<PathBuf>| -> Option<PathBuf> {
            p.as_ref().map(|p| match root {
                Some(root) if p.is_relative() => root.join(p),
                _ => p.clone(),
            })
        };
        DataPaths {
            semeval_abstracts: fix(&self.semeval_abstracts),
            semeval_relations: fix(&self.semeval_relations),
            scierc_json: fix(&self.scierc_json),
            scirex_json: fix(&self.scirex_json),
            sem_unified: fix(&self.sem_unified),
            sci_unified: fix(&self.sci_unified),
            scirex_unified: fix(&self.scirex_unified),
            scierc_partition: fix(&self.scierc_partition),
        }
    }
}

/// Model hyperparameters minus the head schemas (those follow from the
/// label space at run time). Defaults are the usual span-model settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    #[serde(default = "d_encoder_dim")]
    pub encoder_dim: usize,
    #[serde(default = "d_width_dim")]
    pub width_dim: usize,
    #[serde(default = "d_max_span_width")]
    pub max_span_width: usize,
    #[serde(default = "d_neg")]
    pub neg_entity_count: usize,
    #[serde(default = "d_neg")]
    pub neg_relation_count: usize,
    #[serde(default = "d_threshold")]
    pub relation_threshold: f64,
    #[serde(default)]
    pub soft_on_entities: bool,
}

fn d_encoder_dim() -> usize {
    32
}
fn d_width_dim() -> usize {
    25
}
fn d_max_span_width() -> usize {
    10
}
fn d_neg() -> usize {
    100
}
fn d_threshold() -> f64 {
    0.4
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            encoder_dim: d_encoder_dim(),
            width_dim: d_width_dim(),
            max_span_width: d_max_span_width(),
            neg_entity_count: d_neg(),
            neg_relation_count: d_neg(),
            relation_threshold: d_threshold(),
            soft_on_entities: false,
        }
    }
}

impl ModelParams {
    pub fn to_model_config(
        &self,
        sci: HeadSchema,
        sem: HeadSchema,
        divergence: Option<Divergence>,
    ) -> ModelConfig {
        ModelConfig {
            encoder_dim: self.encoder_dim,
            width_dim: self.width_dim,
            max_span_width: self.max_span_width,
            neg_entity_count: self.neg_entity_count,
            neg_relation_count: self.neg_relation_count,
            relation_threshold: self.relation_threshold,
            sci_schema: sci,
            sem_schema: sem,
            divergence,
            soft_on_entities: self.soft_on_entities,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainParams {
    #[serde(default = "d_epochs")]
    pub epochs: usize,
    #[serde(default = "d_lr")]
    pub learning_rate: f64,
    #[serde(default = "d_batch")]
    pub batch_size: usize,
}

fn d_epochs() -> usize {
    200
}
fn d_lr() -> f64 {
    5e-3
}
fn d_batch() -> usize {
    8
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            epochs: d_epochs(),
            learning_rate: d_lr(),
            batch_size: d_batch(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub data: DataPaths,
    /// Training-set recipe (used by the overlap scenario; other scenarios
    /// fix their own strategies).
    #[serde(default = "default_split")]
    pub split: SplitSpec,
    #[serde(default)]
    pub train: TrainParams,
    #[serde(default)]
    pub model: ModelParams,
    #[serde(default)]
    pub divergence: Option<Divergence>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    /// Swap in the tiny encoder and shrink epochs so every scenario smoke
    /// tests in minutes.
    #[serde(default)]
    pub desk_scale: bool,
    /// Data-quantity caps for the quantity scenario (descending).
    #[serde(default)]
    pub quantity_caps: Option<Vec<usize>>,
    /// Expected training-sentence count; deviation beyond 2% is flagged as
    /// a segmentation mismatch in the manifest.
    #[serde(default)]
    pub expected_sentences: Option<usize>,
}

fn default_split() -> SplitSpec {
    SplitSpec::new(sciie_core::builder::Strategy::MtlSoft)
}

fn default_seeds() -> Vec<u64> {
    vec![1, 2, 3, 4, 5]
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let content = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        Ok(serde_json::from_str(&content)?)
    }

    /// Apply the desk-scale preset: tiny encoder dimensions and short
    /// training runs.
    pub fn apply_desk_scale(&mut self) {
        self.desk_scale = true;
        self.train.epochs = self.train.epochs.min(40);
        self.model.encoder_dim = self.model.encoder_dim.min(24);
        self.model.max_span_width = self.model.max_span_width.min(6);
        self.model.neg_entity_count = self.model.neg_entity_count.min(40);
        self.model.neg_relation_count = self.model.neg_relation_count.min(40);
    }

    /// Deterministic hash over everything that influences results. The
    /// output directory is excluded so moving a run does not invalidate it.
    pub fn hash(&self) -> String {
        let mut clone = self.clone();
        clone.output_dir = PathBuf::new();
        let canonical = serde_json::to_string(&clone).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut hex = String::with_capacity(16);
        for b in digest.iter().take(8) {
            hex.push_str(&format!("{b:02x}"));
        }
        hex
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(scenario: Scenario) -> ExperimentConfig {
        ExperimentConfig {
            scenario,
            data: DataPaths::default(),
            split: default_split(),
            train: TrainParams::default(),
            model: ModelParams::default(),
            divergence: None,
            seeds: vec![7],
            output_dir: PathBuf::from("/tmp/x"),
            desk_scale: false,
            quantity_caps: None,
            expected_sentences: None,
        }
    }

    #[test]
    fn hash_ignores_output_dir() {
        let a = minimal(Scenario::StatsReport);
        let mut b = a.clone();
        b.output_dir = PathBuf::from("/elsewhere");
        assert_eq!(a.hash(), b.hash());
    }

    #[test]
    fn hash_tracks_seeds_and_scenario() {
        let a = minimal(Scenario::StatsReport);
        let mut b = a.clone();
        b.seeds = vec![8];
        assert_ne!(a.hash(), b.hash());
        let c = minimal(Scenario::OverlapTable3);
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn config_round_trips_through_json() {
        let a = minimal(Scenario::DataQuantityFig2);
        let s = serde_json::to_string(&a).unwrap();
        let b: ExperimentConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.hash(), b.hash());
    }

    #[test]
    fn data_root_resolves_relative_paths() {
        let d = DataPaths {
            sci_unified: Some(PathBuf::from("sci.jsonl")),
            sem_unified: Some(PathBuf::from("/abs/sem.jsonl")),
            ..DataPaths::default()
        };
        let r = d.resolved(Some(Path::new("/data")));
        assert_eq!(r.sci_unified.unwrap(), PathBuf::from("/data/sci.jsonl"));
        assert_eq!(r.sem_unified.unwrap(), PathBuf::from("/abs/sem.jsonl"));
    }
}
