//! Checkpoint round trip: parameters and predictions survive save/load.

use sciie_core::builder::{build_training_set, HeadId, LabelSpace, SplitSpec, Strategy};
use sciie_core::fixtures;
use sciie_core::labels::{SCIERC_ENTITY_TYPES, SCIERC_RELATION_TYPES, SEMEVAL_RELATION_TYPES};

use sciie_model::checkpoint;
use sciie_model::{train, HeadSchema, ModelConfig, TrainConfig};

#[test]
fn save_and_load_preserve_the_model() {
    let aligned = fixtures::overfit_aligned();
    let spec = SplitSpec {
        label_space: LabelSpace::full(),
        ..SplitSpec::new(Strategy::Mtl)
    };
    let examples = build_training_set(&aligned, None, &spec).unwrap();

    let mut model_cfg = ModelConfig::desk_scale(
        HeadSchema {
            entity_types: SCIERC_ENTITY_TYPES.iter().map(|s| s.to_string()).collect(),
            relation_types: SCIERC_RELATION_TYPES
                .iter()
                .map(|s| s.to_string())
                .collect(),
        },
        HeadSchema {
            entity_types: vec!["ENTITY".to_string()],
            relation_types: SEMEVAL_RELATION_TYPES
                .iter()
                .map(|s| s.to_string())
                .collect(),
        },
    );
    model_cfg.encoder_dim = 12;
    model_cfg.max_span_width = 6;
    let config = TrainConfig {
        epochs: 30,
        learning_rate: 5e-3,
        batch_size: 8,
        seed: 5,
        model: model_cfg,
    };
    let outcome = train(&examples, &config).unwrap();

    let dir = tempfile::tempdir().unwrap();
    checkpoint::save(&outcome.model, dir.path()).unwrap();
    let restored = checkpoint::load(dir.path()).unwrap();

    assert_eq!(outcome.model.params.values, restored.params.values);
    let tokens = examples[0].token_texts();
    for head in [HeadId::Sci, HeadId::Sem] {
        assert_eq!(
            outcome.model.predict(&tokens, head),
            restored.predict(&tokens, head)
        );
    }
}
