//! Scenario orchestration: dataset construction per strategy, per-seed
//! training, evaluation, metrics persistence and plot-data emission.
//!
//! Runs are idempotent for a given config hash: per-seed metrics files that
//! already carry the hash are not recomputed, so a rerun with an identical
//! config is a no-op apart from the manifest timestamp.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use sciie_core::align::{align_all, overlap_statistics, CooccurrenceTable};
use sciie_core::builder::{
    build_scierc_standard_split, build_training_set, HeadId, LabelSpace, SciercPartition,
    SplitSpec, Strategy, TrainingExample,
};
use sciie_core::corpus::{Document, Perspective};
use sciie_core::eval::{
    average_over_seeds, average_sets, score_ner, score_re, score_scirex_cross, EvalResult, Task,
};
use sciie_core::labels::{COMMON_RELATION_PAIRS, OTHER_SCIENTIFIC_TERM_2};
use sciie_core::softlabel::Divergence;

use sciie_model::{train, HeadSchema, JointModel, TrainConfig};

use crate::config::{ExperimentConfig, Scenario};
use crate::data::{
    eval_data, load_sci_corpus, load_scirex_corpus, load_sem_corpus, predict_items,
    scirex_eval_data, EvalData,
};
use crate::plots::{emit_plots, PlotInput, PlotKind, QuantityPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EvalTask {
    NerTyped,
    Re,
    ScirexCross,
}

struct EvalSpec {
    name: String,
    data: EvalData,
    head: HeadId,
    tasks: Vec<EvalTask>,
}

struct RowSpec {
    label: String,
    examples: Vec<TrainingExample>,
    label_space: LabelSpace,
    divergence: Option<Divergence>,
    evals: Vec<EvalSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub label: String,
    pub task: Task,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

impl MetricRow {
    fn from_result(label: &str, r: &EvalResult) -> Self {
        MetricRow {
            label: label.to_string(),
            task: r.task,
            precision: r.precision,
            recall: r.recall,
            f1: r.f1,
            true_positives: r.true_positives,
            false_positives: r.false_positives,
            false_negatives: r.false_negatives,
        }
    }

    fn to_result(&self) -> EvalResult {
        EvalResult {
            task: self.task,
            precision: self.precision,
            recall: self.recall,
            f1: self.f1,
            true_positives: self.true_positives,
            false_positives: self.false_positives,
            false_negatives: self.false_negatives,
            per_seed: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedMetrics {
    pub config_hash: String,
    pub seed: u64,
    pub rows: Vec<MetricRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AggregateMetrics {
    pub config_hash: String,
    pub seeds: Vec<u64>,
    pub rows: Vec<MetricRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub scenario: Scenario,
    pub config_hash: String,
    pub completed_seeds: Vec<u64>,
    pub segmentation_mismatch: Option<String>,
    pub finished_unix_time: u64,
    pub config: ExperimentConfig,
}

pub fn run_scenario(config: &ExperimentConfig) -> Result<()> {
    std::fs::create_dir_all(&config.output_dir)?;
    match config.scenario {
        Scenario::StatsReport => run_stats_report(config),
        Scenario::OverlapTable3 => run_overlap_table3(config),
        Scenario::DataQuantityFig2 => run_data_quantity(config),
        Scenario::LossAblationTable4 => run_loss_ablation(config),
        Scenario::ScirexTable5 => run_scirex(config),
        Scenario::SciercStandardTable6 => run_scierc_standard(config),
    }
}

fn write_manifest(
    config: &ExperimentConfig,
    completed_seeds: Vec<u64>,
    segmentation_mismatch: Option<String>,
) -> Result<()> {
    let manifest = RunManifest {
        scenario: config.scenario,
        config_hash: config.hash(),
        completed_seeds,
        segmentation_mismatch,
        finished_unix_time: SystemTime::now().duration_since(UNIX_EPOCH)?.as_secs(),
        config: config.clone(),
    };
    std::fs::write(
        config.output_dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(())
}

fn schemas_for(space: &LabelSpace) -> (HeadSchema, HeadSchema) {
    (
        HeadSchema {
            entity_types: space.entity_classes(HeadId::Sci),
            relation_types: space.relation_classes(HeadId::Sci),
        },
        HeadSchema {
            entity_types: space.entity_classes(HeadId::Sem),
            relation_types: space.relation_classes(HeadId::Sem),
        },
    )
}

fn train_row(config: &ExperimentConfig, row: &RowSpec, seed: u64) -> Result<JointModel> {
    let (sci, sem) = schemas_for(&row.label_space);
    let model_cfg = config.model.to_model_config(sci, sem, row.divergence);
    let tc = TrainConfig {
        epochs: config.train.epochs,
        learning_rate: config.train.learning_rate,
        batch_size: config.train.batch_size,
        seed,
        model: model_cfg,
    };
    let outcome = train(&row.examples, &tc)
        .with_context(|| format!("training row {:?} with seed {seed}", row.label))?;
    Ok(outcome.model)
}

fn evaluate_row(model: &JointModel, row: &RowSpec) -> Vec<MetricRow> {
    let mut out = Vec::new();
    let mut re_by_name: BTreeMap<String, EvalResult> = BTreeMap::new();

    for eval in &row.evals {
        let (pred_e, pred_r) = predict_items(model, &eval.data.sentences, eval.head);
        for task in &eval.tasks {
            let label = format!("{}/{}", row.label, eval.name);
            let result = match task {
                EvalTask::NerTyped => score_ner(&pred_e, &eval.data.gold_entities, true),
                EvalTask::Re => {
                    let r = score_re(&pred_r, &eval.data.gold_relations, true);
                    re_by_name.insert(eval.name.clone(), r.clone());
                    r
                }
                EvalTask::ScirexCross => score_scirex_cross(&pred_e, &eval.data.gold_entities),
            };
            out.push(MetricRow::from_result(&label, &result));
        }
    }

    // Table-style average when both non-overlap test sets were scored.
    if let (Some(sem), Some(sci)) = (re_by_name.get("semeval"), re_by_name.get("scierc")) {
        let avg = average_sets(sem, sci);
        out.push(MetricRow::from_result(
            &format!("{}/average", row.label),
            &avg,
        ));
    }
    out
}

/// Run rows over all configured seeds with per-seed skip on hash match.
fn run_rows(config: &ExperimentConfig, rows: &[RowSpec]) -> Result<Vec<SeedMetrics>> {
    let hash = config.hash();
    let mut all = Vec::new();
    for &seed in &config.seeds {
        let path = config.output_dir.join(format!("metrics_seed{seed}.json"));
        if let Some(existing) = read_seed_metrics(&path, &hash) {
            all.push(existing);
            continue;
        }
        let mut metric_rows = Vec::new();
        for row in rows {
            let model = train_row(config, row, seed)?;
            metric_rows.extend(evaluate_row(&model, row));
        }
        let metrics = SeedMetrics {
            config_hash: hash.clone(),
            seed,
            rows: metric_rows,
        };
        std::fs::write(&path, serde_json::to_string_pretty(&metrics)?)?;
        all.push(metrics);
    }
    Ok(all)
}

fn read_seed_metrics(path: &Path, hash: &str) -> Option<SeedMetrics> {
    let content = std::fs::read_to_string(path).ok()?;
    let metrics: SeedMetrics = serde_json::from_str(&content).ok()?;
    (metrics.config_hash == hash).then_some(metrics)
}

fn aggregate(config: &ExperimentConfig, per_seed: &[SeedMetrics]) -> Result<AggregateMetrics> {
    let mut grouped: BTreeMap<(String, Task), Vec<(u64, EvalResult)>> = BTreeMap::new();
    for sm in per_seed {
        for row in &sm.rows {
            grouped
                .entry((row.label.clone(), row.task))
                .or_default()
                .push((sm.seed, row.to_result()));
        }
    }
    let mut rows = Vec::new();
    for ((label, _task), results) in grouped {
        let avg = average_over_seeds(&results)?;
        rows.push(MetricRow::from_result(&label, &avg));
    }
    let agg = AggregateMetrics {
        config_hash: config.hash(),
        seeds: config.seeds.clone(),
        rows,
    };
    std::fs::write(
        config.output_dir.join("metrics.json"),
        serde_json::to_string_pretty(&agg)?,
    )?;

    // Plot-friendly tabular data for every scenario.
    let mut csv = String::from("label,task,precision,recall,f1\n");
    for row in &agg.rows {
        writeln!(
            csv,
            "{},{},{:.6},{:.6},{:.6}",
            row.label,
            match row.task {
                Task::Ner => "ner",
                Task::Re => "re",
            },
            row.precision,
            row.recall,
            row.f1
        )?;
    }
    std::fs::write(config.output_dir.join("scores.csv"), csv)?;
    Ok(agg)
}

fn sentence_budget_note(config: &ExperimentConfig, n_examples: usize) -> Option<String> {
    let expected = config.expected_sentences?;
    let deviation = (n_examples as f64 - expected as f64).abs() / expected.max(1) as f64;
    (deviation > 0.02).then(|| {
        format!(
            "training sentences {n_examples} deviate {:.1}% from expected {expected}; check segmentation",
            deviation * 100.0
        )
    })
}

// ---------------------------------------------------------------------------
// Stats report
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct StatsReportFile {
    pub config_hash: String,
    pub sem_documents: usize,
    pub sci_documents: usize,
    pub aligned_documents: usize,
    pub sem_only_documents: usize,
    pub sci_only_documents: usize,
    pub sem_entities_total: usize,
    pub sci_entities_total: usize,
    pub sem_relations_total: usize,
    pub sci_relations_total: usize,
    pub sem_relations_per_doc: f64,
    pub sci_relations_per_doc: f64,
    pub overlap: sciie_core::align::OverlapReport,
    pub cooccurrence_argmax: Vec<CooccurrenceArgmax>,
    pub sem_cooccurrence: CooccurrenceTable,
    pub sci_cooccurrence: CooccurrenceTable,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CooccurrenceArgmax {
    pub sem_relation: String,
    pub sci_relation: String,
    pub sem_argmax: Option<(String, String)>,
    pub sci_argmax: Option<(String, String)>,
    pub coincide: bool,
}

fn run_stats_report(config: &ExperimentConfig) -> Result<()> {
    let hash = config.hash();
    let stats_path = config.output_dir.join("stats.json");
    if let Ok(content) = std::fs::read_to_string(&stats_path) {
        if let Ok(existing) = serde_json::from_str::<StatsReportFile>(&content) {
            if existing.config_hash == hash {
                write_manifest(config, vec![], None)?;
                return Ok(());
            }
        }
    }

    let sem = load_sem_corpus(&config.data)?;
    let sci = load_sci_corpus(&config.data)?;
    let (aligned, sem_only, sci_only) = align_all(&sem, &sci)?;
    let overlap = overlap_statistics(&aligned);

    let count = |docs: &[Document]| -> (usize, usize) {
        (
            docs.iter().map(Document::entity_count).sum(),
            docs.iter().map(Document::relation_count).sum(),
        )
    };
    let (sem_entities_total, sem_relations_total) = count(&sem);
    let (sci_entities_total, sci_relations_total) = count(&sci);

    let sem_table = CooccurrenceTable::from_aligned(&aligned, Perspective::Sem);
    let sci_table = CooccurrenceTable::from_aligned(&aligned, Perspective::Sci);
    let cooccurrence_argmax: Vec<CooccurrenceArgmax> = COMMON_RELATION_PAIRS
        .iter()
        .map(|(sem_rel, sci_rel)| {
            let sem_argmax = sem_table.argmax_pair(sem_rel);
            let sci_argmax = sci_table.argmax_pair(sci_rel);
            CooccurrenceArgmax {
                sem_relation: sem_rel.to_string(),
                sci_relation: sci_rel.to_string(),
                coincide: sem_argmax.is_some() && sem_argmax == sci_argmax,
                sem_argmax,
                sci_argmax,
            }
        })
        .collect();

    let report = StatsReportFile {
        config_hash: hash,
        sem_documents: sem.len(),
        sci_documents: sci.len(),
        aligned_documents: aligned.len(),
        sem_only_documents: sem_only.len(),
        sci_only_documents: sci_only.len(),
        sem_entities_total,
        sci_entities_total,
        sem_relations_total,
        sci_relations_total,
        sem_relations_per_doc: sem_relations_total as f64 / sem.len().max(1) as f64,
        sci_relations_per_doc: sci_relations_total as f64 / sci.len().max(1) as f64,
        overlap: overlap.clone(),
        cooccurrence_argmax,
        sem_cooccurrence: sem_table.clone(),
        sci_cooccurrence: sci_table.clone(),
    };
    std::fs::write(&stats_path, serde_json::to_string_pretty(&report)?)?;

    // Figure-style artifacts: common-relation distribution and per-relation
    // co-occurrence heatmaps.
    if !overlap.relation_distribution.sem.is_empty()
        || !overlap.relation_distribution.sci.is_empty()
    {
        emit_plots(
            &PlotInput::Distribution(overlap.relation_distribution.clone()),
            PlotKind::RelationDistribution,
            &config.output_dir,
        )?;
    }
    let tables: Vec<(String, String, CooccurrenceTable)> = COMMON_RELATION_PAIRS
        .iter()
        .flat_map(|(sem_rel, sci_rel)| {
            [
                ("sem".to_string(), sem_rel.to_string(), sem_table.clone()),
                ("sci".to_string(), sci_rel.to_string(), sci_table.clone()),
            ]
        })
        .collect();
    if !sem_table.counts.is_empty() || !sci_table.counts.is_empty() {
        emit_plots(
            &PlotInput::Cooccurrence(tables),
            PlotKind::CooccurrenceHeatmap,
            &config.output_dir,
        )?;
    }

    write_manifest(config, vec![], None)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Training scenarios
// ---------------------------------------------------------------------------

struct AlignedData {
    aligned: Vec<sciie_core::align::AlignedDocument>,
    sem_only: Vec<Document>,
    sci_only: Vec<Document>,
}

fn load_aligned(config: &ExperimentConfig) -> Result<AlignedData> {
    let sem = load_sem_corpus(&config.data)?;
    let sci = load_sci_corpus(&config.data)?;
    let (aligned, sem_only, sci_only) = align_all(&sem, &sci)?;
    Ok(AlignedData {
        aligned,
        sem_only,
        sci_only,
    })
}

fn is_multi_head(strategy: Strategy) -> bool {
    matches!(strategy, Strategy::Mtl | Strategy::MtlSoft)
}

/// Non-overlap test sets for the overlap experiments. Single-head models
/// predict with the canonical sci head on both sets; multi-task models use
/// each perspective's own head.
fn overlap_evals(data: &AlignedData, split: &SplitSpec, tasks: Vec<EvalTask>) -> Vec<EvalSpec> {
    let multi = is_multi_head(split.strategy);
    let mut evals = Vec::new();
    let forbidden = split.forbidden_eval();
    if forbidden != Some(Perspective::Sem) {
        evals.push(EvalSpec {
            name: "semeval".into(),
            data: eval_data(&data.sem_only, HeadId::Sem, &split.label_space, !multi),
            head: if multi { HeadId::Sem } else { HeadId::Sci },
            tasks: tasks.clone(),
        });
    }
    if forbidden != Some(Perspective::Sci) {
        evals.push(EvalSpec {
            name: "scierc".into(),
            data: eval_data(&data.sci_only, HeadId::Sci, &split.label_space, false),
            head: HeadId::Sci,
            tasks,
        });
    }
    evals
}

fn divergence_or_default(config: &ExperimentConfig) -> Divergence {
    config.divergence.unwrap_or(Divergence::KlStandard)
}

fn run_overlap_table3(config: &ExperimentConfig) -> Result<()> {
    let data = load_aligned(config)?;
    let split = &config.split;
    let extras: Option<&[Document]> = match split.strategy {
        Strategy::ConcatPlusSci => Some(&data.sci_only),
        Strategy::ConcatPlusSem => Some(&data.sem_only),
        _ => None,
    };
    let examples = build_training_set(&data.aligned, extras, split)?;
    let note = sentence_budget_note(config, examples.len());

    let divergence =
        matches!(split.strategy, Strategy::MtlSoft).then(|| divergence_or_default(config));
    let row = RowSpec {
        label: strategy_label(split.strategy),
        examples,
        label_space: split.label_space.clone(),
        divergence,
        evals: overlap_evals(&data, split, vec![EvalTask::Re]),
    };

    let per_seed = run_rows(config, &[row])?;
    aggregate(config, &per_seed)?;
    write_manifest(config, config.seeds.clone(), note)?;
    Ok(())
}

fn strategy_label(strategy: Strategy) -> String {
    serde_json::to_value(strategy)
        .ok()
        .and_then(|v| v.as_str().map(|s| s.to_string()))
        .unwrap_or_else(|| format!("{strategy:?}"))
}

fn run_data_quantity(config: &ExperimentConfig) -> Result<()> {
    let data = load_aligned(config)?;

    // One sentence-level example per strategy; caps subsample them.
    let gold_spec = SplitSpec::new(Strategy::IndependentSci);
    let gold_all = build_training_set(&data.aligned, None, &gold_spec)?;
    let soft_spec = SplitSpec::new(Strategy::MtlSoft);
    let variation_all = build_training_set(&data.aligned, None, &soft_spec)?;

    let total = gold_all.len();
    let caps: Vec<usize> = match &config.quantity_caps {
        Some(caps) => caps.clone(),
        None => {
            // Descending intervals of 100 down to 400, when the corpus is
            // large enough; otherwise just the full size.
            let mut caps = Vec::new();
            let mut c = total - total % 100;
            while c >= 400 {
                caps.push(c);
                c -= 100;
            }
            if caps.is_empty() {
                caps.push(total);
            }
            caps
        }
    };

    const CAP_SEED: u64 = 17;
    let mut rows = Vec::new();
    for &cap in &caps {
        let cap = cap.min(total).max(1);
        for (series, all, spec, divergence) in [
            ("gold", &gold_all, &gold_spec, None),
            (
                "variation",
                &variation_all,
                &soft_spec,
                Some(divergence_or_default(config)),
            ),
        ] {
            let capped =
                sciie_core::builder::cap_data_quantity(all.clone(), cap.min(all.len()), CAP_SEED)?;
            rows.push(RowSpec {
                label: format!("cap{cap}/{series}"),
                examples: capped,
                label_space: spec.label_space.clone(),
                divergence,
                evals: vec![EvalSpec {
                    name: "scierc".into(),
                    data: eval_data(&data.sci_only, HeadId::Sci, &spec.label_space, false),
                    head: HeadId::Sci,
                    tasks: vec![EvalTask::Re],
                }],
            });
        }
    }

    let per_seed = run_rows(config, &rows)?;
    let agg = aggregate(config, &per_seed)?;

    // Curve data: cap on the x axis, one series per labeling.
    let mut points = Vec::new();
    for row in &agg.rows {
        if let Some((cap_part, series_tail)) = row.label.split_once('/') {
            if let Some(cap) = cap_part
                .strip_prefix("cap")
                .and_then(|c| c.parse::<usize>().ok())
            {
                let series = series_tail.split('/').next().unwrap_or(series_tail);
                if series_tail.ends_with("scierc") {
                    points.push(QuantityPoint {
                        cap,
                        series: series.to_string(),
                        f1: row.f1,
                    });
                }
            }
        }
    }
    emit_plots(
        &PlotInput::Quantity(points),
        PlotKind::QuantityCurve,
        &config.output_dir,
    )?;
    write_manifest(config, config.seeds.clone(), None)?;
    Ok(())
}

fn run_loss_ablation(config: &ExperimentConfig) -> Result<()> {
    let data = load_aligned(config)?;
    let variants: [(&str, Strategy, Option<Divergence>); 5] = [
        ("mtl", Strategy::Mtl, None),
        ("mtl_bce", Strategy::MtlSoft, Some(Divergence::Bce)),
        (
            "mtl_cross_entropy",
            Strategy::MtlSoft,
            Some(Divergence::CrossEntropy),
        ),
        (
            "mtl_kl_inverse",
            Strategy::MtlSoft,
            Some(Divergence::KlInverse),
        ),
        (
            "mtl_kl_standard",
            Strategy::MtlSoft,
            Some(Divergence::KlStandard),
        ),
    ];

    let mut rows = Vec::new();
    for (label, strategy, divergence) in variants {
        let spec = SplitSpec::new(strategy);
        let examples = build_training_set(&data.aligned, None, &spec)?;
        rows.push(RowSpec {
            label: label.to_string(),
            examples,
            label_space: spec.label_space.clone(),
            divergence,
            evals: vec![EvalSpec {
                name: "scierc".into(),
                data: eval_data(&data.sci_only, HeadId::Sci, &spec.label_space, false),
                head: HeadId::Sci,
                tasks: vec![EvalTask::Re],
            }],
        });
    }

    let per_seed = run_rows(config, &rows)?;
    aggregate(config, &per_seed)?;
    write_manifest(config, config.seeds.clone(), None)?;
    Ok(())
}

fn run_scirex(config: &ExperimentConfig) -> Result<()> {
    let data = load_aligned(config)?;
    let scirex = load_scirex_corpus(&config.data)?;
    let scirex_data = scirex_eval_data(&scirex);

    let gold_space = LabelSpace::full();
    let variation_space = LabelSpace::Full {
        sem_entity_label: OTHER_SCIENTIFIC_TERM_2.to_string(),
    };

    let mut rows = Vec::new();
    let variants: [(&str, Strategy, &LabelSpace, Option<Divergence>); 3] = [
        ("spert_gold", Strategy::IndependentSci, &gold_space, None),
        ("spert_mtl", Strategy::Mtl, &variation_space, None),
        (
            "spert_mtl_soft",
            Strategy::MtlSoft,
            &variation_space,
            Some(divergence_or_default(config)),
        ),
    ];
    for (label, strategy, space, divergence) in variants {
        let spec = SplitSpec {
            label_space: space.clone(),
            ..SplitSpec::new(strategy)
        };
        let examples = build_training_set(&data.aligned, None, &spec)?;
        rows.push(RowSpec {
            label: label.to_string(),
            examples,
            label_space: space.clone(),
            divergence,
            evals: vec![EvalSpec {
                name: "scirex".into(),
                data: scirex_data.clone(),
                head: HeadId::Sci,
                tasks: vec![EvalTask::ScirexCross],
            }],
        });
    }

    let per_seed = run_rows(config, &rows)?;
    aggregate(config, &per_seed)?;
    write_manifest(config, config.seeds.clone(), None)?;
    Ok(())
}

fn run_scierc_standard(config: &ExperimentConfig) -> Result<()> {
    let data = load_aligned(config)?;
    let partition_path = config
        .data
        .scierc_partition
        .as_ref()
        .context("the standard-split scenario needs data.scierc_partition")?;
    let partition: SciercPartition = serde_json::from_str(
        &std::fs::read_to_string(partition_path)
            .with_context(|| format!("reading partition {}", partition_path.display()))?,
    )?;

    let sci_corpus: Vec<Document> = data
        .aligned
        .iter()
        .map(|p| p.sci_doc.clone())
        .chain(data.sci_only.iter().cloned())
        .collect();
    let (examples, test_docs) =
        build_scierc_standard_split(&sci_corpus, &data.aligned, &partition)?;

    let space = LabelSpace::full();
    let row = RowSpec {
        label: "standard_split".into(),
        examples,
        label_space: space.clone(),
        divergence: Some(divergence_or_default(config)),
        evals: vec![EvalSpec {
            name: "scierc_test".into(),
            data: eval_data(&test_docs, HeadId::Sci, &space, false),
            head: HeadId::Sci,
            tasks: vec![EvalTask::NerTyped, EvalTask::Re],
        }],
    };

    let per_seed = run_rows(config, &[row])?;
    aggregate(config, &per_seed)?;
    write_manifest(config, config.seeds.clone(), None)?;
    Ok(())
}
