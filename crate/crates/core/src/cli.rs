//! Command-line entry points.
//!
//! Every subcommand writes its report to stdout; failures print one JSON
//! record `{"error": kind, "message": ...}` to stderr and exit nonzero
//! (2 for usage and input-path errors, 1 otherwise).

use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::evaluation::{sweep, EvaluationConfig, EvaluationInputs};
use crate::formats::{self, FormatError};
use crate::iaa::{annotator_pairs, iaa_report};
use crate::model::{
    AnnotatorId, Corpus, EntityMention, InventoryId, ScoreCategory, SenseInventory,
    SYSTEM_INVENTORY,
};
use crate::render;
use crate::service::{self, ServiceConfig};
use crate::validation::{corpus_statistics, coverage_report, validate};
use crate::wsd::{
    GoldStandard, LemmaMode, LemmaTable, Lemmatizer, Markup, ScorerSpec, TsvScorer, WindowSize,
};

#[derive(Debug, Parser)]
#[command(
    name = "sensekit",
    version,
    about = "Sense annotation and WSD workbench"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check annotations against the consistency rules.
    Validate(ValidateArgs),
    /// Token, lemma, sense and entity counts.
    Stats(StatsArgs),
    /// Lemma and sense coverage per inventory.
    Coverage(CoverageArgs),
    /// Inter-annotator agreement per annotator pair and inventory.
    Iaa(IaaArgs),
    /// Top-k WSD accuracy over inventories and window sizes.
    WsdEval(WsdEvalArgs),
    /// Run the annotation HTTP service.
    Serve(ServeArgs),
    /// Convert between the corpus format and a per-token CSV export.
    Convert(ConvertArgs),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

/// `ID=PATH`, or just `PATH` with the file stem as id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconArg {
    pub id: InventoryId,
    pub path: PathBuf,
}

impl std::str::FromStr for LexiconArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (id, path) = match s.split_once('=') {
            Some((id, path)) => (id.to_owned(), PathBuf::from(path)),
            None => {
                let path = PathBuf::from(s);
                let stem = path
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .ok_or_else(|| format!("cannot derive an inventory id from {s:?}"))?
                    .to_owned();
                (stem, path)
            }
        };
        if id.is_empty() || id == SYSTEM_INVENTORY {
            return Err(format!("invalid inventory id {id:?}"));
        }
        Ok(Self {
            id: InventoryId::new(id),
            path,
        })
    }
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub annotations: PathBuf,
    /// Sense inventory as ID=PATH (repeatable).
    #[arg(long = "lexicon", required = true)]
    pub lexicons: Vec<LexiconArg>,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long)]
    pub entities: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long = "lexicon", required = true)]
    pub lexicons: Vec<LexiconArg>,
    #[arg(long)]
    pub entities: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct IaaArgs {
    #[arg(long)]
    pub annotations: PathBuf,
    /// Annotator pair A,B (repeatable). Default: every pair sharing items.
    #[arg(long = "pair")]
    pub pairs: Vec<String>,
    /// Inventory id (repeatable). Default: every inventory in the annotations.
    #[arg(long = "inventory")]
    pub inventories: Vec<InventoryId>,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct WsdEvalArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Gold annotations.
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long = "lexicon", required = true)]
    pub lexicons: Vec<LexiconArg>,
    /// gold-oracle, adversarial, pseudo:SEED or an http(s) endpoint (repeatable).
    #[arg(long = "scorer", required = true)]
    pub scorers: Vec<ScorerSpec>,
    /// Window sizes: 3, 5, 7, 9, 11 or all (repeatable or comma separated).
    #[arg(long = "window", value_delimiter = ',', default_value = "11")]
    pub windows: Vec<WindowSize>,
    #[arg(long, default_value = "none")]
    pub markup: Markup,
    #[arg(long, default_value = "gold")]
    pub lemma_mode: LemmaMode,
    /// Surface-to-lemma table for external lemma mode.
    #[arg(long)]
    pub lemma_table: Option<PathBuf>,
    #[arg(long)]
    pub entities: Option<PathBuf>,
    /// Lowest category counted as a correct sense.
    #[arg(long, default_value = "60")]
    pub threshold: ScoreCategory,
    #[arg(long)]
    pub include_function_words: bool,
    /// Skip tokens without gold instead of failing.
    #[arg(long)]
    pub skip_unannotated: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "SENSEKIT_CORPUS")]
    pub corpus: PathBuf,
    /// ID=PATH (repeatable; comma separated in the environment variable).
    #[arg(
        long = "lexicon",
        env = "SENSEKIT_LEXICONS",
        value_delimiter = ',',
        required = true
    )]
    pub lexicons: Vec<LexiconArg>,
    #[arg(long, env = "SENSEKIT_DATA_DIR")]
    pub data_dir: PathBuf,
    #[arg(long, env = "SENSEKIT_LISTEN", default_value = "127.0.0.1:8080")]
    pub listen: SocketAddr,
    #[arg(long, env = "SENSEKIT_ENTITIES")]
    pub entities: Option<PathBuf>,
    #[arg(long, env = "SENSEKIT_LEMMA_TABLE")]
    pub lemma_table: Option<PathBuf>,
    /// JSONL of {"annotator_id", "words"}.
    #[arg(long, env = "SENSEKIT_ASSIGNMENTS")]
    pub assignments: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub snapshot_every: u64,
    /// Annotations to import if the data directory is empty.
    #[arg(long, env = "SENSEKIT_SEED")]
    pub seed: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CorpusFormat {
    Jsonl,
    Csv,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Defaults to the input file extension.
    #[arg(long, value_enum)]
    pub from: Option<CorpusFormat>,
    /// Defaults to the output file extension.
    #[arg(long, value_enum)]
    pub to: Option<CorpusFormat>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Format(FormatError::Io { .. }) => "io",
            CliError::Format(_) => "format",
            CliError::Failed(_) => "failed",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Format(FormatError::Io { .. }) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Serialize)]
struct ErrorRecord<'a> {
    error: &'a str,
    message: String,
}

fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

fn emit<T: Serialize>(
    out: &mut dyn Write,
    format: OutputFormat,
    value: &T,
    text: impl FnOnce(&T) -> String,
) -> Result<(), CliError> {
    let s = match format {
        OutputFormat::Text => text(value),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(value).map_err(failed)?;
            s.push('\n');
            s
        }
    };
    out.write_all(s.as_bytes()).map_err(failed)
}

fn load_lexicons(args: &[LexiconArg]) -> Result<Vec<SenseInventory>, CliError> {
    let mut seen = std::collections::BTreeSet::new();
    args.iter()
        .map(|l| {
            if !seen.insert(&l.id) {
                return Err(CliError::Usage(format!("inventory {} given twice", l.id)));
            }
            Ok(formats::read_lexicon(l.id.clone(), &l.path)?)
        })
        .collect()
}

fn load_entities(path: Option<&Path>) -> Result<Vec<EntityMention>, CliError> {
    Ok(match path {
        Some(p) => formats::read_entities(p)?,
        None => Vec::new(),
    })
}

fn extension(path: &Path) -> Option<CorpusFormat> {
    match path.extension()?.to_str()? {
        "jsonl" | "json" => Some(CorpusFormat::Jsonl),
        "csv" => Some(CorpusFormat::Csv),
        _ => None,
    }
}

/// Runs one parsed command, writing its report to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Validate(a) => {
            let corpus = formats::read_corpus(&a.corpus)?;
            let annotations = formats::read_annotations(&a.annotations)?;
            let lexicons = load_lexicons(&a.lexicons)?;
            let refs: Vec<&SenseInventory> = lexicons.iter().collect();
            let flags = validate(&corpus, &annotations, &refs).map_err(failed)?;
            emit(out, a.format, &flags, |f| render::flags_table(f))
        }
        Command::Stats(a) => {
            let corpus = formats::read_corpus(&a.corpus)?;
            let annotations = formats::read_annotations(&a.annotations)?;
            let mentions = load_entities(a.entities.as_deref())?;
            let stats = corpus_statistics(&corpus, &annotations, &mentions);
            emit(out, a.format, &stats, render::statistics_table)
        }
        Command::Coverage(a) => {
            let corpus = formats::read_corpus(&a.corpus)?;
            let annotations = formats::read_annotations(&a.annotations)?;
            let lexicons = load_lexicons(&a.lexicons)?;
            let mentions = load_entities(a.entities.as_deref())?;
            let reports: Vec<_> = lexicons
                .iter()
                .map(|inv| coverage_report(&corpus, &annotations, inv, &mentions))
                .collect();
            emit(out, a.format, &reports, |r| render::coverage_table(r))
        }
        Command::Iaa(a) => {
            let annotations = formats::read_annotations(&a.annotations)?;
            let pairs = if a.pairs.is_empty() {
                annotator_pairs(&annotations)
            } else {
                a.pairs
                    .iter()
                    .map(|p| match p.split_once(',') {
                        Some((x, y)) if !x.trim().is_empty() && !y.trim().is_empty() => {
                            Ok((AnnotatorId::new(x.trim()), AnnotatorId::new(y.trim())))
                        }
                        _ => Err(CliError::Usage(format!("--pair expects A,B, got {p:?}"))),
                    })
                    .collect::<Result<_, _>>()?
            };
            let inventories = if a.inventories.is_empty() {
                let set: std::collections::BTreeSet<InventoryId> = annotations
                    .iter()
                    .filter(|x| x.inventory_id.as_str() != SYSTEM_INVENTORY)
                    .map(|x| x.inventory_id.clone())
                    .collect();
                set.into_iter().collect()
            } else {
                a.inventories
            };
            let report = iaa_report(&annotations, &pairs, &inventories).map_err(failed)?;
            emit(out, a.format, &report, render::iaa_table)
        }
        Command::WsdEval(a) => {
            let corpus = formats::read_corpus(&a.corpus)?;
            let annotations = formats::read_annotations(&a.annotations)?;
            let lexicons = load_lexicons(&a.lexicons)?;
            let mentions = load_entities(a.entities.as_deref())?;
            let lemma_table = match &a.lemma_table {
                Some(p) => Some(formats::read_lemma_table(p)?),
                None => None,
            };
            if a.lemma_mode == LemmaMode::External && lemma_table.is_none() {
                return Err(CliError::Usage(
                    "--lemma-mode external needs --lemma-table".into(),
                ));
            }
            let report = run_sweep(
                &corpus,
                &annotations,
                &lexicons,
                &mentions,
                lemma_table.as_ref(),
                &a,
            );
            emit(out, a.format, &report, render::sweep_table)
        }
        Command::Serve(a) => {
            let config = ServiceConfig {
                corpus: a.corpus,
                lexicons: a.lexicons.into_iter().map(|l| (l.id, l.path)).collect(),
                data_dir: a.data_dir,
                listen: a.listen,
                entities: a.entities,
                lemma_table: a.lemma_table,
                assignments: a.assignments,
                snapshot_every: a.snapshot_every,
                seed: a.seed,
            };
            let rt = tokio::runtime::Runtime::new().map_err(failed)?;
            rt.block_on(service::serve(config))
                .map_err(|e| failed(format!("{e:#}")))
        }
        Command::Convert(a) => {
            let from = a.from.or_else(|| extension(&a.input)).ok_or_else(|| {
                CliError::Usage("cannot infer --from from the input extension".into())
            })?;
            let to = a.to.or_else(|| extension(&a.output)).ok_or_else(|| {
                CliError::Usage("cannot infer --to from the output extension".into())
            })?;
            let corpus = match from {
                CorpusFormat::Jsonl => formats::read_corpus(&a.input)?,
                CorpusFormat::Csv => {
                    let f =
                        std::fs::File::open(&a.input).map_err(|e| FormatError::io(&a.input, e))?;
                    formats::read_token_csv(f)?
                }
            };
            write_corpus_as(&a.output, &corpus, to)?;
            writeln!(
                out,
                "{} sentences, {} tokens",
                corpus.len(),
                corpus.token_count()
            )
            .map_err(failed)
        }
    }
}

fn write_corpus_as(path: &Path, corpus: &Corpus, format: CorpusFormat) -> Result<(), CliError> {
    match format {
        CorpusFormat::Jsonl => formats::write_corpus_file(path, corpus)?,
        CorpusFormat::Csv => {
            let f = std::fs::File::create(path).map_err(|e| FormatError::io(path, e))?;
            formats::write_token_csv(std::io::BufWriter::new(f), corpus)?;
        }
    }
    Ok(())
}

fn run_sweep(
    corpus: &Corpus,
    annotations: &[crate::model::ScoredSenseAnnotation],
    lexicons: &[SenseInventory],
    mentions: &[EntityMention],
    lemma_table: Option<&LemmaTable>,
    a: &WsdEvalArgs,
) -> crate::evaluation::SweepReport {
    let gold = Arc::new(GoldStandard::from_annotations(annotations));
    let scorers: Vec<Box<dyn TsvScorer>> = a
        .scorers
        .iter()
        .map(|s| s.build(gold.clone(), a.threshold))
        .collect();
    let scorer_refs: Vec<&dyn TsvScorer> = scorers.iter().map(|s| s.as_ref()).collect();
    let inventories: Vec<&SenseInventory> = lexicons.iter().collect();
    let base = EvaluationConfig {
        markup: a.markup,
        lemma_mode: a.lemma_mode,
        correctness_threshold: a.threshold,
        include_function_words: a.include_function_words,
        skip_unannotated: a.skip_unannotated,
        ..EvaluationConfig::new(inventories[0].id().clone(), a.windows[0])
    };
    let inputs = EvaluationInputs {
        corpus,
        gold: &gold,
        mentions,
        lemmatizer: lemma_table.map(|t| t as &dyn Lemmatizer),
    };
    sweep(inputs, &inventories, &scorer_refs, &a.windows, &base)
}

/// Parses `args`, runs the command and returns its stdout.
pub fn run_to_string<I, T>(args: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut buf = Vec::new();
    run(cli, &mut buf)?;
    String::from_utf8(buf).map_err(failed)
}

fn report_error(kind: &str, message: String) {
    let record = ErrorRecord {
        error: kind,
        message,
    };
    eprintln!(
        "{}",
        serde_json::to_string(&record).expect("error record serializes")
    );
}

/// Process entry point used by the binary.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report_error("usage", e.render().to_string().trim_end().to_owned());
            return ExitCode::from(2);
        }
    };
    if matches!(cli.command, Command::Serve(_)) {
        tracing_subscriber::fmt()
            .with_env_filter(
                tracing_subscriber::EnvFilter::try_from_default_env()
                    .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
            )
            .with_writer(std::io::stderr)
            .init();
    }
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = lock.flush();
            report_error(e.kind(), e.to_string());
            ExitCode::from(e.exit_code())
        }
    }
}
