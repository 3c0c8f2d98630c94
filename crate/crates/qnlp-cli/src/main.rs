//! Command-line front end: dataset generation, sentence-to-circuit
//! inspection, training and evaluation. Every file-producing run lands in a
//! run directory with a provenance manifest.

mod manifest;
mod plot;

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use manifest::RunManifest;
use qnlp::data::{
    binarize, generate_synthetic, llm, load_jsonl, save_jsonl, stats, vocab::standard_lexicon,
    Complexity, DataError, Dataset, GenConfig,
};
use qnlp::discocat::{bend_rewrite, build_diagram, compile, AnsatzConfig, DiscocatError};
use qnlp::grammar::{assign_types, reduce, tokenize, GrammarError, Lexicon};
use qnlp::qlstm::{LstmConfig, QlstmConfig, QlstmError};
use qnlp::train::{
    evaluate, train_model, ModelKind, TrainConfig, TrainError, TrainOutcome, TrainedModel,
};

#[derive(Parser)]
#[command(name = "qnlp", version, about = "Quantum NLP sentiment toolkit")]
struct Cli {
    /// Cap the worker thread count (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labelled sentence dataset (synthetic or via a chat endpoint).
    GenData(GenDataArgs),
    /// Show the grammar pipeline for one sentence, up to a chosen stage.
    Parse(ParseArgs),
    /// Train a model and write curve, checkpoint and metrics.
    Train(TrainArgs),
    /// Evaluate a checkpoint on a dataset.
    Eval(EvalArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ComplexityArg {
    Low,
    Moderate,
}

impl From<ComplexityArg> for Complexity {
    fn from(value: ComplexityArg) -> Self {
        match value {
            ComplexityArg::Low => Complexity::Low,
            ComplexityArg::Moderate => Complexity::Moderate,
        }
    }
}

#[derive(Args)]
struct GenDataArgs {
    /// Number of sentences.
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = ComplexityArg::Low)]
    complexity: ComplexityArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Target class shares as `neg,neu,pos` (defaults to the per-complexity
    /// reference distribution).
    #[arg(long)]
    shares: Option<String>,
    /// Output directory (default: runs/<stamp>-seed<seed>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Query a chat-completion endpoint instead of the offline generator.
    #[arg(long)]
    llm: bool,
    /// Chat endpoint URL (with --llm).
    #[arg(long)]
    endpoint: Option<String>,
    /// Model name sent to the endpoint.
    #[arg(long, default_value = "gpt-4")]
    model_name: String,
    /// Environment variable holding the API key.
    #[arg(long, default_value = "QNLP_LLM_API_KEY")]
    auth_env: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Stage {
    Tokens,
    Types,
    Derivation,
    Diagram,
    Circuit,
}

impl Stage {
    fn name(self) -> &'static str {
        match self {
            Stage::Tokens => "tokens",
            Stage::Types => "types",
            Stage::Derivation => "derivation",
            Stage::Diagram => "diagram",
            Stage::Circuit => "circuit",
        }
    }
}

#[derive(Args)]
struct ParseArgs {
    /// The sentence to analyze.
    sentence: String,
    #[arg(long, value_enum, default_value_t = Stage::Circuit)]
    stage: Stage,
    /// Lexicon TSV (default: the built-in financial lexicon).
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Keep cups as Bell effects instead of bending nouns into effects.
    #[arg(long)]
    no_bend: bool,
    /// Optional run directory for dumps and a manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Lstm,
    Qlstm,
    Discocat,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Dataset JSONL path.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 20)]
    epochs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Learning rate (default 0.005 for lstm, 0.01 for circuit models).
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long, default_value_t = 16)]
    batch_size: usize,
    /// Hyperparameter preset matching the dataset complexity.
    #[arg(long, value_enum, default_value_t = ComplexityArg::Low)]
    preset: ComplexityArg,
    /// Split fractions `train,val,test`.
    #[arg(long, default_value = "0.8,0.1,0.1")]
    split: String,
    /// Early-stop patience in epochs (disabled when absent).
    #[arg(long)]
    early_stop: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG of the loss/accuracy curves.
    #[arg(long)]
    plot: bool,
    /// Lexicon TSV for the sentence-circuit model.
    #[arg(long)]
    lexicon: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    /// Dataset JSONL path.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let result = match cli.command {
        Command::GenData(args) => cmd_gen_data(args),
        Command::Parse(args) => cmd_parse(args),
        Command::Train(args) => cmd_train(args),
        Command::Eval(args) => cmd_eval(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(exit_code_for(&err));
    }
}

/// Exit codes: 2 usage, 3 environment, 4 data/grammar, 5 numeric.
fn exit_code_for(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<DataError>() {
            return match e {
                DataError::Auth(_) | DataError::Network(_) | DataError::Io(_) => 3,
                _ => 4,
            };
        }
        if cause.downcast_ref::<GrammarError>().is_some() {
            return 4;
        }
        if let Some(e) = cause.downcast_ref::<DiscocatError>() {
            return match e {
                DiscocatError::Sim(_) => 5,
                _ => 4,
            };
        }
        if let Some(e) = cause.downcast_ref::<QlstmError>() {
            return match e {
                QlstmError::BadConfig(_) => 2,
                QlstmError::EmptySequence | QlstmError::UnknownToken { .. }
                | QlstmError::Checkpoint(_) => 4,
                QlstmError::DimensionMismatch(_) => 5,
            };
        }
        if let Some(e) = cause.downcast_ref::<TrainError>() {
            return match e {
                TrainError::BadSplit(_) | TrainError::BadConfig(_) => 2,
                TrainError::Io(_) => 3,
                TrainError::TooSmall(_) | TrainError::EmptySplit | TrainError::InvalidLabel(_) => 4,
                TrainError::NonFiniteGradient(_) | TrainError::Model(_) => 5,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 3;
        }
    }
    1
}

fn default_run_dir(seed: u64) -> PathBuf {
    PathBuf::from("runs").join(format!("{}-seed{}", manifest::run_dir_stamp(), seed))
}

fn parse_triple(text: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("parsing `{text}` as three comma-separated numbers"))?;
    if parts.len() != 3 {
        bail!("expected three comma-separated numbers, got {}", parts.len());
    }
    Ok((parts[0], parts[1], parts[2]))
}

fn load_lexicon(path: Option<&Path>) -> Result<Lexicon> {
    match path {
        None => Ok(standard_lexicon()),
        Some(path) => {
            let lexicon = Lexicon::from_tsv_file(path)
                .with_context(|| format!("reading lexicon {}", path.display()))??;
            Ok(lexicon.with_fallback())
        }
    }
}

fn print_distribution_table(dataset: &Dataset) -> Result<serde_json::Value> {
    let s = stats(dataset)?;
    println!("class      share");
    let names = ["negative", "neutral", "positive"];
    for (name, share) in names.iter().zip(&s.class_shares) {
        println!("{name:<10} {:.1}%", share * 100.0);
    }
    println!("mean word count  {:.2}", s.mean_word_count);
    println!("vocabulary size  {}", s.vocab_size);
    Ok(serde_json::to_value(&s)?)
}

fn cmd_gen_data(args: GenDataArgs) -> Result<()> {
    let run_dir = args.out.clone().unwrap_or_else(|| default_run_dir(args.seed));
    let complexity: Complexity = args.complexity.into();
    let mut config = match complexity {
        Complexity::Low => GenConfig::low(args.n, args.seed),
        Complexity::Moderate => GenConfig::moderate(args.n, args.seed),
    };
    if let Some(shares) = &args.shares {
        config.target_shares = parse_triple(shares)?;
    }

    let mut manifest = RunManifest::begin(
        &run_dir,
        "gen-data",
        json!({ "gen": config, "llm": args.llm, "endpoint": args.endpoint, "model": args.model_name }),
        args.seed,
        &[],
    )?;

    let result = (|| -> Result<()> {
        let dataset = if args.llm {
            let endpoint = args
                .endpoint
                .clone()
                .ok_or_else(|| anyhow!("--llm requires --endpoint"))?;
            let client = llm::HttpChatClient::new(llm::EndpointConfig {
                url: endpoint,
                model: args.model_name.clone(),
                api_key_env: args.auth_env.clone(),
            });
            let generated = llm::llm_generate(&client, complexity)?;
            let transcript = run_dir.join("transcript.txt");
            std::fs::write(&transcript, &generated.raw)?;
            manifest.add_output(&transcript);
            if !generated.unparseable.is_empty() {
                eprintln!("{} unparseable reply lines:", generated.unparseable.len());
                for (line, reason) in &generated.unparseable {
                    eprintln!("  line {line}: {reason}");
                }
            }
            generated.dataset
        } else {
            generate_synthetic(&config)?
        };

        let data_path = run_dir.join("dataset.jsonl");
        save_jsonl(&dataset, &data_path)?;
        manifest.add_output(&data_path);

        let stats_value = print_distribution_table(&dataset)?;
        let stats_path = run_dir.join("stats.json");
        std::fs::write(&stats_path, serde_json::to_string_pretty(&stats_value)?)?;
        manifest.add_output(&stats_path);
        Ok(())
    })();

    manifest.finish(if result.is_ok() { "ok" } else { "error" })?;
    result
}

fn cmd_parse(args: ParseArgs) -> Result<()> {
    let lexicon = load_lexicon(args.lexicon.as_deref())?;
    let tokens = tokenize(&args.sentence);

    let output = match args.stage {
        Stage::Tokens => serde_json::to_string(&tokens)?,
        Stage::Types => {
            let typed = assign_types(&tokens, &lexicon)?;
            typed
                .iter()
                .map(|(_, ty)| ty.to_string())
                .collect::<Vec<_>>()
                .join(" | ")
        }
        Stage::Derivation => {
            let typed = assign_types(&tokens, &lexicon)?;
            reduce(&typed)?.to_debug_json()
        }
        Stage::Diagram | Stage::Circuit => {
            let typed = assign_types(&tokens, &lexicon)?;
            let derivation = reduce(&typed)?;
            let mut diagram = build_diagram(&derivation)?;
            if !args.no_bend {
                diagram = bend_rewrite(&diagram);
            }
            if args.stage == Stage::Diagram {
                serde_json::to_string_pretty(&diagram)?
            } else {
                let compiled = compile(&diagram, &AnsatzConfig::default())?;
                let circuit: serde_json::Value = serde_json::from_str(&compiled.circuit.to_json())?;
                let sidecar: serde_json::Value = serde_json::from_str(&compiled.sidecar_json())?;
                serde_json::to_string_pretty(&json!({
                    "circuit": circuit,
                    "postselect": sidecar["postselect"],
                    "s_qubits": sidecar["s_qubits"],
                    "param_names": compiled.param_names,
                }))?
            }
        }
    };
    println!("{output}");

    if let Some(out) = &args.out {
        let mut manifest = RunManifest::begin(
            out,
            "parse",
            json!({ "sentence": args.sentence, "stage": args.stage.name(), "bend": !args.no_bend }),
            0,
            &[],
        )?;
        let dump = out.join("parse.json");
        std::fs::write(&dump, &output)?;
        manifest.add_output(&dump);
        manifest.finish("ok")?;
    }
    Ok(())
}

fn model_kind_for(args: &TrainArgs) -> ModelKind {
    match (args.model, args.preset) {
        (ModelArg::Lstm, ComplexityArg::Low) => ModelKind::Lstm(LstmConfig::defaults(0)),
        (ModelArg::Lstm, ComplexityArg::Moderate) => ModelKind::Lstm(LstmConfig::moderate(0)),
        (ModelArg::Qlstm, ComplexityArg::Low) => ModelKind::Qlstm(QlstmConfig::defaults(0)),
        (ModelArg::Qlstm, ComplexityArg::Moderate) => {
            let mut config = QlstmConfig::defaults(0);
            config.embed_dim = 10;
            ModelKind::Qlstm(config)
        }
        (ModelArg::Discocat, _) => ModelKind::Discocat(AnsatzConfig::default()),
    }
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let run_dir = args.out.clone().unwrap_or_else(|| default_run_dir(args.seed));
    let kind = model_kind_for(&args);
    let learning_rate = args.lr.unwrap_or(match args.model {
        ModelArg::Lstm => 0.005,
        _ => 0.01,
    });
    let config = TrainConfig {
        epochs: args.epochs,
        batch_size: args.batch_size,
        learning_rate,
        seed: args.seed,
        split: parse_triple(&args.split)?,
        early_stop_patience: args.early_stop,
    };

    let (dataset, report) =
        load_jsonl(&args.data).with_context(|| format!("loading {}", args.data.display()))?;
    if !report.skipped.is_empty() {
        eprintln!("skipped {} malformed dataset lines", report.skipped.len());
    }

    let (dataset, binarize_info) = if matches!(kind, ModelKind::Discocat(_)) {
        let before = dataset.len();
        let binary = binarize(&dataset);
        let info = json!({
            "before": before,
            "after": binary.len(),
            "neutral_dropped": before - binary.len(),
        });
        (binary, Some(info))
    } else {
        (dataset, None)
    };

    let mut manifest = RunManifest::begin(
        &run_dir,
        "train",
        json!({
            "model": kind,
            "train": config,
            "data": args.data.display().to_string(),
            "binarize": binarize_info,
            "lexicon": args.lexicon.as_ref().map(|p| p.display().to_string()),
        }),
        args.seed,
        &[args.data.as_path()],
    )?;

    let result = (|| -> Result<TrainOutcome> {
        let lexicon = load_lexicon(args.lexicon.as_deref())?;
        let outcome = train_model(&kind, &dataset, &config, &lexicon, Some(&run_dir))?;
        manifest.add_output(&run_dir.join("curve.csv"));

        let checkpoint = run_dir.join("checkpoint.json");
        outcome.model.save(&checkpoint)?;
        manifest.add_output(&checkpoint);

        let metrics = json!({
            "test": outcome.test,
            "epochs_run": outcome.records.len(),
            "final": outcome.records.last(),
            "skipped_unparseable": {
                "train": outcome.skipped.0,
                "val": outcome.skipped.1,
                "test": outcome.skipped.2,
            },
        });
        let metrics_path = run_dir.join("metrics.json");
        std::fs::write(&metrics_path, serde_json::to_string_pretty(&metrics)?)?;
        manifest.add_output(&metrics_path);

        if args.plot {
            let svg_path = run_dir.join("curves.svg");
            std::fs::write(&svg_path, plot::curves_svg(&outcome.records))?;
            manifest.add_output(&svg_path);
        }
        Ok(outcome)
    })();

    manifest.finish(if result.is_ok() { "ok" } else { "error" })?;
    let outcome = result?;
    println!(
        "trained {} for {} epochs; test accuracy {:.3}, test loss {:.4}",
        kind.name(),
        outcome.records.len(),
        outcome.test.accuracy,
        outcome.test.loss
    );
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let model = TrainedModel::load(&args.checkpoint)
        .with_context(|| format!("loading checkpoint {}", args.checkpoint.display()))?;
    let (dataset, report) =
        load_jsonl(&args.data).with_context(|| format!("loading {}", args.data.display()))?;
    if !report.skipped.is_empty() {
        eprintln!("skipped {} malformed dataset lines", report.skipped.len());
    }
    let eval = evaluate(&model, &dataset)?;
    let metrics = json!({
        "model": model.kind_name(),
        "n": eval.n,
        "loss": eval.loss,
        "accuracy": eval.accuracy,
        "confusion": eval.confusion,
        "skipped": eval.skipped,
    });
    println!("{}", serde_json::to_string_pretty(&metrics)?);

    if let Some(out) = &args.out {
        let mut manifest = RunManifest::begin(
            out,
            "eval",
            json!({
                "checkpoint": args.checkpoint.display().to_string(),
                "data": args.data.display().to_string(),
            }),
            0,
            &[args.checkpoint.as_path(), args.data.as_path()],
        )?;
        let metrics_path = out.join("metrics.json");
        std::fs::write(&metrics_path, serde_json::to_string_pretty(&metrics)?)?;
        manifest.add_output(&metrics_path);
        manifest.finish("ok")?;
    }
    Ok(())
}
