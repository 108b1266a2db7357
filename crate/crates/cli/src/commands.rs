use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use revscope_core::evaluation::{evaluate_models, AnnotatedCorpus, QueryInputs, DEFAULT_K_VALUES};
use revscope_core::{ingest, Aggregation, Corpus, ModelRegistry, Pipeline, RankedList};

use crate::config::{load_pipeline, ServiceConfig};
use crate::engine::{Engine, RankRequest};

#[derive(Debug, Parser)]
#[command(
    name = "revscope",
    version,
    about = "Rank published systematic reviews by semantic similarity"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate and curate a line-delimited record file into a corpus.
    Ingest(IngestArgs),
    /// Rank a corpus against research questions or a seed abstract.
    Rank(RankArgs),
    /// Score rankings of every model against human annotations.
    Evaluate(EvaluateArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
    /// List the embedding models in a directory.
    Models(ModelsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Rq,
    Seed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AggregationArg {
    Concat,
    MaxPerQuestion,
}

impl From<AggregationArg> for Aggregation {
    fn from(a: AggregationArg) -> Self {
        match a {
            AggregationArg::Concat => Aggregation::Concat,
            AggregationArg::MaxPerQuestion => Aggregation::MaxPerQuestion,
        }
    }
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Pipeline settings (TOML). Defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// One research question per line.
    #[arg(long, required_if_eq("mode", "rq"))]
    pub questions_file: Option<PathBuf>,
    #[arg(long, required_if_eq("mode", "seed"))]
    pub seed_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "concat")]
    pub aggregation: AggregationArg,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub query: QueryArgs,
    #[arg(long)]
    pub corpus: PathBuf,
    /// Model name (file stem in --models-dir). Optional when the directory
    /// holds a single model.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub models_dir: PathBuf,
    /// Keep only the top k results.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub query: QueryArgs,
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long)]
    pub models_dir: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_K_VALUES)]
    pub k: Vec<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Print an aligned table to standard output.
    #[arg(long)]
    pub table: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Args)]
pub struct ModelsArgs {
    #[arg(long)]
    pub models_dir: PathBuf,
}

fn read_text(path: &Path, what: &str) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {what} {}", path.display()))
}

impl QueryArgs {
    pub fn inputs(&self) -> Result<QueryInputs> {
        Ok(match self.mode {
            Mode::Rq => {
                let path = self.questions_file.as_ref().context("--questions-file is required")?;
                let questions = read_text(path, "questions file")?
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty())
                    .map(str::to_string)
                    .collect();
                QueryInputs::ResearchQuestions {
                    questions,
                    aggregation: self.aggregation.into(),
                }
            }
            Mode::Seed => {
                let path = self.seed_file.as_ref().context("--seed-file is required")?;
                QueryInputs::SeedAbstract(read_text(path, "seed file")?)
            }
        })
    }
}

fn write_output(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content).with_context(|| format!("cannot write {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

/// Canonical serialization for ranked lists and reports.
pub fn to_canonical_json<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn load_models(dir: &Path) -> Result<ModelRegistry> {
    ModelRegistry::load_dir(dir).with_context(|| format!("cannot load models from {}", dir.display()))
}

pub fn run_ingest(args: &IngestArgs) -> Result<Corpus> {
    let pipeline = load_pipeline(args.config.as_deref())?;
    let corpus = ingest(&args.input, &pipeline).with_context(|| format!("cannot ingest {}", args.input.display()))?;
    corpus.save(&args.output)?;
    Ok(corpus)
}

pub fn run_rank(args: &RankArgs) -> Result<RankedList> {
    let corpus = Corpus::load(&args.corpus).with_context(|| format!("cannot load corpus {}", args.corpus.display()))?;
    let registry = load_models(&args.models_dir)?;
    let model = match &args.model {
        Some(m) => m.clone(),
        None if registry.len() == 1 => registry.names().remove(0),
        None => bail!(
            "--model is required when {} holds {} models",
            args.models_dir.display(),
            registry.len()
        ),
    };
    if registry.get(&model).is_none() {
        bail!("unknown model `{model}` in {}", args.models_dir.display());
    }
    let pipeline = Pipeline::with_config(corpus.pipeline_config.clone())?;
    let engine = Engine::new(corpus, pipeline, registry, model)?;
    let request = RankRequest {
        model: None,
        query: args.query.inputs()?,
        abstracts: None,
    };
    let mut ranked = engine.rank(&request)?;
    if let Some(k) = args.k {
        ranked.truncate(k);
    }
    Ok(ranked)
}

pub fn run_evaluate(args: &EvaluateArgs) -> Result<revscope_core::EvaluationReport> {
    if args.k.is_empty() || args.k.contains(&0) {
        bail!("--k values must be positive");
    }
    let corpus = Corpus::load(&args.corpus).with_context(|| format!("cannot load corpus {}", args.corpus.display()))?;
    let annotated = AnnotatedCorpus::load(&corpus, &args.annotations)
        .with_context(|| format!("cannot load annotations {}", args.annotations.display()))?;
    let registry = load_models(&args.models_dir)?;
    if registry.is_empty() {
        bail!("no models found in {}", args.models_dir.display());
    }
    let pipeline = Pipeline::with_config(corpus.pipeline_config.clone())?;
    let inputs = args.query.inputs()?;
    Ok(evaluate_models(&annotated, &registry, &pipeline, &inputs, &args.k))
}

pub fn models_table(registry: &ModelRegistry) -> String {
    let rows: Vec<[String; 3]> = registry
        .list_models()
        .into_iter()
        .map(|m| [m.name, m.dimension.to_string(), m.vocab_size.to_string()])
        .collect();
    let width = |c: usize| rows.iter().map(|r| r[c].len()).max().unwrap_or(0);
    let (w0, w1) = (width(0), width(1));
    rows.iter()
        .map(|r| format!("{:<w0$}  {:>w1$}  {}\n", r[0], r[1], r[2]))
        .collect()
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest(args) => {
            let corpus = run_ingest(&args)?;
            eprintln!("ingested {} records into {}", corpus.len(), args.output.display());
        }
        Command::Rank(args) => {
            let ranked = run_rank(&args)?;
            write_output(args.output.as_deref(), &to_canonical_json(&ranked)?)?;
        }
        Command::Evaluate(args) => {
            let report = run_evaluate(&args)?;
            if args.table {
                write_output(None, &report.to_table())?;
            }
            if args.output.is_some() || !args.table {
                write_output(args.output.as_deref(), &to_canonical_json(&report)?)?;
            }
        }
        Command::Serve(args) => {
            let config = ServiceConfig::load(&args.config)?;
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(crate::gateway::serve(config))?;
        }
        Command::Models(args) => {
            let registry = load_models(&args.models_dir)?;
            write_output(None, &models_table(&registry))?;
        }
    }
    Ok(())
}
