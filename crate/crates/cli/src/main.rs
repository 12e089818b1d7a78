//! Command-line front end: parsing, alignment, statistics, dataset
//! building, training, evaluation, scenario orchestration and plots.
//!
//! The default data root comes from SCIIE_DATA_ROOT and can be overridden
//! with --data-root; every relative data path in a config resolves against
//! it. Exit code 0 on success, nonzero with a diagnostic on any error.

mod config;
mod data;
mod plots;
mod scenario;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use sciie_core::align::{align_all, overlap_statistics};
use sciie_core::builder::{
    build_training_set, write_training_set, HeadId, LabelSpace, SplitSpec, Strategy,
};
use sciie_core::eval::{score_ner, score_re};
use sciie_core::io::{parse_scierc, parse_scirex_abstracts, parse_semeval, write_unified};
use sciie_core::softlabel::Divergence;

use sciie_model::{checkpoint, train, HeadSchema, TrainConfig};

use config::{DataPaths, ExperimentConfig};
use data::{eval_data, predict_items};
use plots::{emit_plots, PlotInput, PlotKind, QuantityPoint};

#[derive(Parser)]
#[command(
    name = "sciie",
    version,
    about = "Multi-perspective scientific IE toolkit"
)]
struct Cli {
    /// Root directory for relative data paths (default: SCIIE_DATA_ROOT).
    #[arg(long, global = true)]
    data_root: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse native releases into the unified interchange format.
    Parse(ParseArgs),
    /// Align two unified corpora and report the overlap partition.
    Align(AlignArgs),
    /// Corpus and overlap statistics (documents, entities, relations,
    /// common relations, agreement levels, co-occurrence).
    Stats(StatsArgs),
    /// Build a training-set variant from aligned corpora.
    Build(BuildArgs),
    /// Train the joint extractor on a built training set.
    Train(TrainArgs),
    /// Evaluate a checkpoint on a unified corpus.
    Evaluate(EvaluateArgs),
    /// Run a full experiment scenario from a config file.
    Scenario(ScenarioArgs),
    /// Emit plot data (and an SVG) from run artifacts.
    Plot(PlotArgs),
}

#[derive(Args)]
struct ParseArgs {
    #[arg(long)]
    semeval_abstracts: Option<PathBuf>,
    #[arg(long)]
    semeval_relations: Option<PathBuf>,
    #[arg(long)]
    scierc: Option<PathBuf>,
    #[arg(long)]
    scirex: Option<PathBuf>,
    #[arg(long)]
    output_dir: PathBuf,
}

#[derive(Args)]
struct AlignArgs {
    /// SemEval corpus in unified format.
    #[arg(long)]
    sem: PathBuf,
    /// SciERC corpus in unified format.
    #[arg(long)]
    sci: PathBuf,
    #[arg(long)]
    output_dir: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    sem: PathBuf,
    #[arg(long)]
    sci: PathBuf,
    #[arg(long)]
    output_dir: PathBuf,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    sem: PathBuf,
    #[arg(long)]
    sci: PathBuf,
    /// independent_sem | independent_sci | concat | concat_plus_sci |
    /// concat_plus_sem | mixed | mixed_sci | mixed_sem | mtl | mtl_soft
    #[arg(long)]
    strategy: String,
    /// common5 | full
    #[arg(long, default_value = "common5")]
    label_space: String,
    /// Entity label for SemEval mentions in the full space.
    #[arg(long, default_value = "ENTITY")]
    sem_entity_label: String,
    /// Deterministic subsample size.
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long, default_value_t = 17)]
    cap_seed: u64,
    #[arg(long)]
    output_dir: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// Training set in unified format (from `build`).
    #[arg(long)]
    train_set: PathBuf,
    #[arg(long, default_value = "common5")]
    label_space: String,
    #[arg(long, default_value = "ENTITY")]
    sem_entity_label: String,
    /// kl_standard | kl_inverse | cross_entropy | bce
    #[arg(long)]
    divergence: Option<String>,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 5e-3)]
    learning_rate: f64,
    #[arg(long, default_value_t = 8)]
    batch_size: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 32)]
    encoder_dim: usize,
    #[arg(long, default_value_t = 10)]
    max_span_width: usize,
    #[arg(long)]
    output_dir: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Checkpoint directory written by `train`.
    #[arg(long)]
    checkpoint: PathBuf,
    /// Test corpus in unified format.
    #[arg(long)]
    test: PathBuf,
    /// sci | sem: which model head predicts and which gold perspective is
    /// scored.
    #[arg(long, default_value = "sci")]
    head: String,
    #[arg(long, default_value = "common5")]
    label_space: String,
    #[arg(long, default_value = "ENTITY")]
    sem_entity_label: String,
    /// Map SemEval gold labels into SciERC naming before scoring.
    #[arg(long, default_value_t = false)]
    to_sci_naming: bool,
    /// Require endpoint entity types to match for RE.
    #[arg(long, default_value_t = false)]
    strict_re: bool,
    #[arg(long)]
    output_dir: PathBuf,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's output directory.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Override the config's seed list.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Tiny encoder and short training for smoke runs.
    #[arg(long, default_value_t = false)]
    desk_scale: bool,
}

#[derive(Args)]
struct PlotArgs {
    /// quantity_curve | relation_distribution | cooccurrence_heatmap
    #[arg(long)]
    kind: String,
    /// Input artifact: quantity points JSON for curves, stats.json for the
    /// distribution and heatmaps.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output_dir: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn data_root(cli_root: &Option<PathBuf>) -> Option<PathBuf> {
    cli_root
        .clone()
        .or_else(|| std::env::var_os("SCIIE_DATA_ROOT").map(PathBuf::from))
}

fn run(cli: Cli) -> Result<()> {
    let root = data_root(&cli.data_root);
    match cli.command {
        Command::Parse(args) => cmd_parse(args),
        Command::Align(args) => cmd_align(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Build(args) => cmd_build(args),
        Command::Train(args) => cmd_train(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Scenario(args) => cmd_scenario(args, root.as_deref()),
        Command::Plot(args) => cmd_plot(args),
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn parse_label_space(space: &str, sem_entity_label: &str) -> Result<LabelSpace> {
    match space {
        "common5" => Ok(LabelSpace::Common5),
        "full" => Ok(LabelSpace::Full {
            sem_entity_label: sem_entity_label.to_string(),
        }),
        other => bail!("unknown label space {other:?} (expected common5 or full)"),
    }
}

fn parse_strategy(s: &str) -> Result<Strategy> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| anyhow::anyhow!("unknown strategy {s:?}"))
}

fn parse_divergence(s: &str) -> Result<Divergence> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| anyhow::anyhow!("unknown divergence {s:?}"))
}

fn cmd_parse(args: ParseArgs) -> Result<()> {
    std::fs::create_dir_all(&args.output_dir)?;
    let mut reports = Vec::new();

    if let (Some(abstracts), Some(relations)) = (&args.semeval_abstracts, &args.semeval_relations) {
        let (docs, report) =
            parse_semeval(&read_to_string(abstracts)?, &read_to_string(relations)?)?;
        std::fs::write(
            args.output_dir.join("sem.unified.jsonl"),
            write_unified(&docs),
        )?;
        println!(
            "semeval: {} documents, {} entities, {} relations ({} dropped)",
            report.documents, report.entities, report.relations, report.dropped_relations
        );
        reports.push(report);
    }
    if let Some(path) = &args.scierc {
        let (docs, report) = parse_scierc(&read_to_string(path)?)?;
        std::fs::write(
            args.output_dir.join("sci.unified.jsonl"),
            write_unified(&docs),
        )?;
        println!(
            "scierc: {} documents, {} entities, {} relations ({} dropped)",
            report.documents, report.entities, report.relations, report.dropped_relations
        );
        reports.push(report);
    }
    if let Some(path) = &args.scirex {
        let (docs, report) = parse_scirex_abstracts(&read_to_string(path)?)?;
        std::fs::write(
            args.output_dir.join("scirex.unified.jsonl"),
            write_unified(&docs),
        )?;
        println!(
            "scirex: {} documents, {} entities",
            report.documents, report.entities
        );
        reports.push(report);
    }
    if reports.is_empty() {
        bail!("nothing to parse: pass at least one input");
    }
    std::fs::write(
        args.output_dir.join("parse_report.json"),
        serde_json::to_string_pretty(&reports)?,
    )?;
    Ok(())
}

fn cmd_align(args: AlignArgs) -> Result<()> {
    std::fs::create_dir_all(&args.output_dir)?;
    let sem = sciie_core::io::read_unified(&read_to_string(&args.sem)?)?;
    let sci = sciie_core::io::read_unified(&read_to_string(&args.sci)?)?;
    let (aligned, sem_only, sci_only) = align_all(&sem, &sci)?;
    let report = overlap_statistics(&aligned);

    let aligned_sem: Vec<_> = aligned.iter().map(|p| p.sem_doc.clone()).collect();
    let aligned_sci: Vec<_> = aligned.iter().map(|p| p.sci_doc.clone()).collect();
    std::fs::write(
        args.output_dir.join("aligned_sem.jsonl"),
        write_unified(&aligned_sem),
    )?;
    std::fs::write(
        args.output_dir.join("aligned_sci.jsonl"),
        write_unified(&aligned_sci),
    )?;
    std::fs::write(
        args.output_dir.join("sem_only.jsonl"),
        write_unified(&sem_only),
    )?;
    std::fs::write(
        args.output_dir.join("sci_only.jsonl"),
        write_unified(&sci_only),
    )?;
    std::fs::write(
        args.output_dir.join("overlap_report.json"),
        serde_json::to_string_pretty(&report)?,
    )?;
    println!(
        "aligned {} pairs; {} sem-only, {} sci-only",
        aligned.len(),
        sem_only.len(),
        sci_only.len()
    );
    Ok(())
}

fn cmd_stats(args: StatsArgs) -> Result<()> {
    let config = ExperimentConfig {
        scenario: config::Scenario::StatsReport,
        data: DataPaths {
            sem_unified: Some(args.sem),
            sci_unified: Some(args.sci),
            ..DataPaths::default()
        },
        split: SplitSpec::new(Strategy::MtlSoft),
        train: config::TrainParams::default(),
        model: config::ModelParams::default(),
        divergence: None,
        seeds: vec![],
        output_dir: args.output_dir,
        desk_scale: false,
        quantity_caps: None,
        expected_sentences: None,
    };
    scenario::run_scenario(&config)?;
    println!(
        "stats written to {}",
        config.output_dir.join("stats.json").display()
    );
    Ok(())
}

fn cmd_build(args: BuildArgs) -> Result<()> {
    std::fs::create_dir_all(&args.output_dir)?;
    let sem = sciie_core::io::read_unified(&read_to_string(&args.sem)?)?;
    let sci = sciie_core::io::read_unified(&read_to_string(&args.sci)?)?;
    let (aligned, sem_only, sci_only) = align_all(&sem, &sci)?;

    let strategy = parse_strategy(&args.strategy)?;
    let spec = SplitSpec {
        label_space: parse_label_space(&args.label_space, &args.sem_entity_label)?,
        cap: args.cap.map(|n| (n, args.cap_seed)),
        ..SplitSpec::new(strategy)
    };
    let extras: Option<&[sciie_core::Document]> = match strategy {
        Strategy::ConcatPlusSci => Some(&sci_only),
        Strategy::ConcatPlusSem => Some(&sem_only),
        _ => None,
    };
    let examples = build_training_set(&aligned, extras, &spec)?;

    #[derive(serde::Serialize)]
    struct BuildManifest<'a> {
        spec: &'a SplitSpec,
        examples: usize,
        soft_labels: usize,
        sci_head_examples: usize,
        sem_head_examples: usize,
    }
    let manifest = BuildManifest {
        spec: &spec,
        examples: examples.len(),
        soft_labels: examples.iter().map(|e| e.soft_labels.len()).sum(),
        sci_head_examples: examples.iter().filter(|e| e.sci.is_some()).count(),
        sem_head_examples: examples.iter().filter(|e| e.sem.is_some()).count(),
    };
    std::fs::write(
        args.output_dir.join("build_manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    std::fs::write(
        args.output_dir.join("training_set.jsonl"),
        write_training_set(&examples),
    )?;
    println!("built {} examples ({})", examples.len(), args.strategy);
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    std::fs::create_dir_all(&args.output_dir)?;
    let examples = sciie_core::builder::read_training_set(&read_to_string(&args.train_set)?)?;
    let space = parse_label_space(&args.label_space, &args.sem_entity_label)?;
    let divergence = args
        .divergence
        .as_deref()
        .map(parse_divergence)
        .transpose()?;

    let schemas = (
        HeadSchema {
            entity_types: space.entity_classes(HeadId::Sci),
            relation_types: space.relation_classes(HeadId::Sci),
        },
        HeadSchema {
            entity_types: space.entity_classes(HeadId::Sem),
            relation_types: space.relation_classes(HeadId::Sem),
        },
    );
    let mut model_cfg = sciie_model::ModelConfig::desk_scale(schemas.0, schemas.1);
    model_cfg.encoder_dim = args.encoder_dim;
    model_cfg.max_span_width = args.max_span_width;
    model_cfg.divergence = divergence;

    let tc = TrainConfig {
        epochs: args.epochs,
        learning_rate: args.learning_rate,
        batch_size: args.batch_size,
        seed: args.seed,
        model: model_cfg,
    };
    let outcome = train(&examples, &tc)?;
    checkpoint::save(&outcome.model, &args.output_dir)?;
    std::fs::write(
        args.output_dir.join("history.json"),
        serde_json::to_string_pretty(&outcome.history)?,
    )?;
    let last = outcome.history.last().expect("at least one epoch");
    println!(
        "trained {} epochs; final loss {:.4} (multi {:.4}, soft {:.4})",
        outcome.history.len(),
        last.loss_total,
        last.loss_multi,
        last.loss_soft
    );
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    std::fs::create_dir_all(&args.output_dir)?;
    let model = checkpoint::load(&args.checkpoint)?;
    let docs = sciie_core::io::read_unified(&read_to_string(&args.test)?)?;
    let head = match args.head.as_str() {
        "sci" => HeadId::Sci,
        "sem" => HeadId::Sem,
        other => bail!("unknown head {other:?} (expected sci or sem)"),
    };
    let space = parse_label_space(&args.label_space, &args.sem_entity_label)?;
    let data = eval_data(&docs, head, &space, args.to_sci_naming);
    let (pred_e, pred_r) = predict_items(&model, &data.sentences, head);

    let ner = score_ner(&pred_e, &data.gold_entities, true);
    let re = score_re(&pred_r, &data.gold_relations, !args.strict_re);

    #[derive(serde::Serialize)]
    struct EvalFile {
        ner: sciie_core::eval::EvalResult,
        re: sciie_core::eval::EvalResult,
    }
    std::fs::write(
        args.output_dir.join("eval.json"),
        serde_json::to_string_pretty(&EvalFile {
            ner: ner.clone(),
            re: re.clone(),
        })?,
    )?;
    println!(
        "ner P {:.4} R {:.4} F1 {:.4} | re P {:.4} R {:.4} F1 {:.4}",
        ner.precision, ner.recall, ner.f1, re.precision, re.recall, re.f1
    );
    Ok(())
}

fn cmd_scenario(args: ScenarioArgs, root: Option<&Path>) -> Result<()> {
    let mut config = ExperimentConfig::from_file(&args.config)?;
    config.data = config.data.resolved(root);
    if let Some(out) = args.output_dir {
        config.output_dir = out;
    }
    if let Some(seeds) = args.seeds {
        config.seeds = seeds;
    }
    if args.desk_scale {
        config.apply_desk_scale();
    }
    scenario::run_scenario(&config)?;
    println!(
        "scenario {} finished; artifacts in {}",
        config.scenario.as_str(),
        config.output_dir.display()
    );
    Ok(())
}

fn cmd_plot(args: PlotArgs) -> Result<()> {
    let kind: PlotKind = args.kind.parse()?;
    let content = read_to_string(&args.input)?;
    let input = match kind {
        PlotKind::QuantityCurve => {
            let points: Vec<QuantityPoint> = serde_json::from_str(&content)
                .context("quantity input must be a JSON array of {cap, series, f1}")?;
            PlotInput::Quantity(points)
        }
        PlotKind::RelationDistribution => {
            let stats: scenario::StatsReportFile =
                serde_json::from_str(&content).context("expecting a stats.json artifact")?;
            PlotInput::Distribution(stats.overlap.relation_distribution)
        }
        PlotKind::CooccurrenceHeatmap => {
            let stats: scenario::StatsReportFile =
                serde_json::from_str(&content).context("expecting a stats.json artifact")?;
            let tables = sciie_core::labels::COMMON_RELATION_PAIRS
                .iter()
                .flat_map(|(sem_rel, sci_rel)| {
                    [
                        (
                            "sem".to_string(),
                            sem_rel.to_string(),
                            stats.sem_cooccurrence.clone(),
                        ),
                        (
                            "sci".to_string(),
                            sci_rel.to_string(),
                            stats.sci_cooccurrence.clone(),
                        ),
                    ]
                })
                .collect();
            PlotInput::Cooccurrence(tables)
        }
    };
    let written = emit_plots(&input, kind, &args.output_dir)?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}
