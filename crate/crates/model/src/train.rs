//! Training loop: seeded shuffling, per-epoch negative resampling, Adam.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use sciie_core::builder::TrainingExample;

use crate::autodiff::Adam;
use crate::encoder::Vocab;
use crate::error::ModelError;
use crate::sampling::derive_seed;
use crate::spert::{prepare_example, JointModel, ModelConfig, PreparedExample};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
    pub model: ModelConfig,
}

impl TrainConfig {
    pub fn new(model: ModelConfig) -> Self {
        TrainConfig {
            epochs: 200,
            learning_rate: 5e-3,
            batch_size: 8,
            seed: 1,
            model,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub loss_multi: f64,
    pub loss_soft: f64,
    pub loss_total: f64,
}

pub struct TrainOutcome {
    pub model: JointModel,
    pub history: Vec<EpochStats>,
}

/// Build vocabulary, initialize a tiny-encoder model and train it.
pub fn train(
    examples: &[TrainingExample],
    config: &TrainConfig,
) -> Result<TrainOutcome, ModelError> {
    if examples.is_empty() {
        return Err(ModelError::Train("no training examples".into()));
    }
    let token_lists: Vec<Vec<&str>> = examples.iter().map(|e| e.token_texts()).collect();
    let vocab = Vocab::build(token_lists.iter().map(|t| t.as_slice()));
    let mut model = JointModel::with_tiny_encoder(config.model.clone(), vocab, config.seed);
    let history = train_model(&mut model, examples, config)?;
    Ok(TrainOutcome { model, history })
}

/// Train an existing model in place, returning per-epoch loss history.
pub fn train_model(
    model: &mut JointModel,
    examples: &[TrainingExample],
    config: &TrainConfig,
) -> Result<Vec<EpochStats>, ModelError> {
    let mut adam = Adam::new(config.learning_rate, model.params.len());
    let mut history = Vec::with_capacity(config.epochs);
    let batch_size = config.batch_size.max(1);

    for epoch in 0..config.epochs {
        // Deterministic epoch shuffle.
        let mut order: Vec<usize> = (0..examples.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, epoch, 0, 7));
        for i in (1..order.len()).rev() {
            let j = rng.random_range(0..=i);
            order.swap(i, j);
        }

        let mut sums = (0.0, 0.0, 0.0);
        let mut n_batches = 0usize;
        for chunk in order.chunks(batch_size) {
            let prepared: Result<Vec<PreparedExample>, ModelError> = chunk
                .iter()
                .map(|&i| {
                    prepare_example(
                        &examples[i],
                        &config.model,
                        derive_seed(config.seed, epoch, i, 0),
                    )
                })
                .collect();
            let prepared = prepared?;

            let mut grads = vec![0.0; model.params.len()];
            let losses = model.batch_backward(&prepared, &mut grads);
            adam.step(&mut model.params.values, &grads);

            sums.0 += losses.multi;
            sums.1 += losses.soft;
            sums.2 += losses.total;
            n_batches += 1;
        }
        let n = n_batches.max(1) as f64;
        history.push(EpochStats {
            epoch,
            loss_multi: sums.0 / n,
            loss_soft: sums.1 / n,
            loss_total: sums.2 / n,
        });
    }

    Ok(history)
}
