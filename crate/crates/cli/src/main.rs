use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use depcross::corpus::{analyze, load_treebank, treebank_name, ProcessedCorpus};
use depcross::generators::{make_linear, make_star, make_uniform_random_tree, shuffle_linearization, TreeKind};
use depcross::ingest::{write_conll, IngestConfig, PunctuationRule, RawSentence, RawToken, Strictness, TokenClass};
use depcross::metrics::SentenceMetrics;
use depcross::par::configure_threads;
use depcross::pipeline::{meta_analysis, non_rejected, SentenceScope, SummaryOptions};
use depcross::report::{
    read_metrics_tsv, write_debug_tsv, write_meta_tsv, write_metrics_tsv, write_p0_tsv, write_summary_tsv,
    write_validation_tsv, AnalyzeReport,
};
use depcross::tree::DepTree;
use depcross::{Error, Execution, RandomSource};

/// Crossings versus dependency lengths in dependency treebanks.
#[derive(Parser, Debug)]
#[command(name = "depcross", version)]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// Replicas of the Monte Carlo test on p(tau >= 0).
    #[arg(long, global = true, env = "DEPCROSS_T_REPLICAS", default_value_t = 10_000)]
    t_replicas: u64,

    /// Replicas of the Fisher randomization tests in `meta`.
    #[arg(long, global = true, env = "DEPCROSS_META_REPLICAS", default_value_t = 1_000_000)]
    meta_replicas: u64,

    /// Significance level.
    #[arg(long, global = true, env = "DEPCROSS_ALPHA", default_value_t = 0.05)]
    alpha: f64,

    #[arg(long, global = true, env = "DEPCROSS_SEED", default_value_t = 1)]
    seed: u64,

    /// How punctuation tokens are recognized.
    #[arg(long, global = true, env = "DEPCROSS_PUNCT_RULE", value_enum, default_value_t = PunctRule::Form)]
    punct_rule: PunctRule,

    /// Comma-separated POS tags that mark punctuation (pos and combined rules).
    #[arg(long, global = true, env = "DEPCROSS_PUNCT_TAGS", value_delimiter = ',')]
    punct_tags: Vec<String>,

    /// Comma-separated forms that mark null elements.
    #[arg(long, global = true, env = "DEPCROSS_NULL_FORMS", value_delimiter = ',', default_value = "NULL")]
    null_forms: Vec<String>,

    #[arg(long, global = true, env = "DEPCROSS_FORMAT", value_enum, default_value_t = Format::Tsv)]
    format: Format,

    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "DEPCROSS_JOBS")]
    jobs: Option<usize>,

    /// Stop at the first malformed sentence instead of skipping it.
    #[arg(long, global = true, env = "DEPCROSS_STRICT")]
    strict: bool,

    /// Sentences counted in S and the mean length.
    #[arg(long, global = true, env = "DEPCROSS_STATS_SCOPE", value_enum, default_value_t = Scope::Accepted)]
    stats_scope: Scope,

    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Correlation summary of each treebank.
    Analyze {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Inputs are metrics dumps rather than treebanks.
        #[arg(long)]
        from_metrics: bool,
        /// Table printed in TSV mode.
        #[arg(long, value_enum, default_value_t = Table::Summary)]
        table: Table,
    },
    /// Per-sentence n, D, C and Q.
    Metrics {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Compares the treebanks where p(tau >= 0) is not significant with the rest.
    Meta {
        /// JSON reports written by `analyze --format json`.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Synthetic trees as CoNLL or as a metrics dump.
    Simulate(SimulateArgs),
    /// Parse, prune and validate, reporting what was dropped and why.
    Validate {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Per-sentence prune and validation trace.
        #[arg(long)]
        debug_dump: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    n: usize,
    /// Hub position of a star.
    #[arg(long)]
    hub: Option<usize>,
    /// Comma-separated vertex order of a linear tree.
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<usize>>,
    /// One star per hub position.
    #[arg(long)]
    all_placements: bool,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Place the vertices of each tree in a random order.
    #[arg(long)]
    shuffle: bool,
    #[arg(long, value_enum, default_value_t = Emit::Conll)]
    emit: Emit,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PunctRule {
    Form,
    Pos,
    Combined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Scope {
    Accepted,
    Analyzed,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Table {
    Summary,
    P0,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Star,
    Linear,
    UniformRandom,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Emit {
    Conll,
    Metrics,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Lib(Error::Io(e))
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Lib(Error::Config(_) | Error::Domain(_)) => 1,
            CliError::Lib(Error::Degenerate(_)) => 3,
            CliError::Lib(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

impl GlobalOpts {
    fn check(&self) -> CliResult {
        if self.t_replicas == 0 || self.meta_replicas == 0 {
            return Err(CliError::Usage("replica counts must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CliError::Usage(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        Ok(())
    }

    fn ingest_config(&self) -> CliResult<IngestConfig> {
        let tags: BTreeSet<String> = self.punct_tags.iter().map(|t| t.trim().to_string()).collect();
        let config = IngestConfig {
            punctuation: match self.punct_rule {
                PunctRule::Form => PunctuationRule::UnicodeForm,
                PunctRule::Pos => PunctuationRule::PosTagSet(tags),
                PunctRule::Combined => PunctuationRule::Combined(tags),
            },
            null_forms: self.null_forms.iter().map(|f| f.trim().to_string()).collect(),
            strictness: if self.strict {
                Strictness::FailFast
            } else {
                Strictness::SkipMalformed
            },
        };
        config.validate()?;
        Ok(config)
    }

    fn summary_options(&self) -> SummaryOptions {
        SummaryOptions {
            replicas: self.t_replicas,
            scope: match self.stats_scope {
                Scope::Accepted => SentenceScope::Accepted,
                Scope::Analyzed => SentenceScope::Analyzed,
            },
            exec: Execution::default(),
        }
    }

    fn sink(&self) -> CliResult<Box<dyn Write>> {
        Ok(match &self.output {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn load_all(inputs: &[PathBuf], config: &IngestConfig) -> CliResult<Vec<ProcessedCorpus>> {
    inputs
        .iter()
        .map(|path| {
            let corpus = load_treebank(path, config, Execution::default()).map_err(|e| with_path(e, path))?;
            let v = &corpus.validation;
            log::info!(
                "{}: {} sentences, {} accepted, {} rejected, {} malformed",
                v.name,
                v.parsed,
                v.accepted,
                v.rejected_total(),
                v.skipped_malformed
            );
            Ok(corpus)
        })
        .collect()
}

fn with_path(e: Error, path: &Path) -> Error {
    match e {
        Error::Io(io) => Error::Io(io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
        other => other,
    }
}

fn run_analyze(opts: &GlobalOpts, inputs: &[PathBuf], from_metrics: bool, table: Table) -> CliResult {
    let treebanks: Vec<(String, Vec<SentenceMetrics>)> = if from_metrics {
        inputs
            .iter()
            .map(|path| {
                let name = treebank_name(path);
                let file = File::open(path).map_err(|e| with_path(e.into(), path))?;
                Ok((name.clone(), read_metrics_tsv(BufReader::new(file), &name)?))
            })
            .collect::<CliResult<_>>()?
    } else {
        load_all(inputs, &opts.ingest_config()?)?
            .into_iter()
            .map(|c| (c.name, c.metrics))
            .collect()
    };
    let report = analyze(&treebanks, &opts.summary_options(), opts.seed)?;
    let mut out = opts.sink()?;
    match (opts.format, table) {
        (Format::Json, _) => out.write_all(report.to_json()?.as_bytes())?,
        (Format::Tsv, Table::Summary) => write_summary_tsv(&mut out, &report.treebanks)?,
        (Format::Tsv, Table::P0) => write_p0_tsv(&mut out, &report.treebanks)?,
    }
    out.flush()?;
    Ok(())
}

fn run_metrics(opts: &GlobalOpts, inputs: &[PathBuf]) -> CliResult {
    let corpora = load_all(inputs, &opts.ingest_config()?)?;
    for c in &corpora {
        let v = &c.validation;
        eprintln!("{}: {} accepted, {} rejected", v.name, v.accepted, v.rejected_total());
    }
    let metrics: Vec<SentenceMetrics> = corpora.into_iter().flat_map(|c| c.metrics).collect();
    let mut out = opts.sink()?;
    match opts.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &metrics).map_err(Error::from)?;
            writeln!(out)?;
        }
        Format::Tsv => write_metrics_tsv(&mut out, &metrics)?,
    }
    out.flush()?;
    Ok(())
}

fn run_meta(opts: &GlobalOpts, inputs: &[PathBuf]) -> CliResult {
    let mut summaries = Vec::new();
    for path in inputs {
        let text = fs::read_to_string(path).map_err(|e| with_path(e.into(), path))?;
        summaries.extend(AnalyzeReport::from_json(&text)?.treebanks);
    }
    let subset = non_rejected(&summaries, opts.alpha);
    let source = RandomSource::new(opts.seed);
    let result = meta_analysis(&summaries, &subset, opts.meta_replicas, &source, Execution::default())?;
    let mut out = opts.sink()?;
    match opts.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &result).map_err(Error::from)?;
            writeln!(out)?;
        }
        Format::Tsv => write_meta_tsv(&mut out, &result)?,
    }
    out.flush()?;
    Ok(())
}

fn to_sentence(tree: &DepTree) -> RawSentence {
    let tokens = tree
        .heads()
        .iter()
        .enumerate()
        .map(|(i, &head)| RawToken {
            index: i + 1,
            form: format!("w{}", i + 1),
            pos_tag: String::new(),
            head,
            class: TokenClass::Regular,
        })
        .collect();
    RawSentence {
        tokens,
        source_id: tree.source_id().to_string(),
    }
}

fn simulated_trees(args: &SimulateArgs, seed: u64) -> CliResult<Vec<DepTree>> {
    let kind = match args.kind {
        Kind::Star => TreeKind::Star,
        Kind::Linear => TreeKind::Linear,
        Kind::UniformRandom => TreeKind::UniformRandom,
    };
    if args.all_placements && kind != TreeKind::Star {
        return Err(CliError::Usage("--all-placements only applies to stars".into()));
    }
    let source = RandomSource::new(seed);
    let base: Vec<DepTree> = match kind {
        TreeKind::Star if args.all_placements => (1..=args.n).map(|h| make_star(args.n, h)).collect::<Result<_, _>>()?,
        TreeKind::Star => vec![make_star(args.n, args.hub.unwrap_or(1))?],
        TreeKind::Linear => {
            let identity: Vec<usize> = (1..=args.n).collect();
            vec![make_linear(args.n, args.order.as_deref().unwrap_or(&identity))?]
        }
        TreeKind::UniformRandom => (0..args.count)
            .map(|i| make_uniform_random_tree(args.n, &mut source.substream(i as u64, 0)))
            .collect::<Result<_, _>>()?,
    };
    // fixed kinds repeat their trees `count` times; random trees are already `count` draws
    let repeats = if kind == TreeKind::UniformRandom { 1 } else { args.count };
    let mut trees = Vec::with_capacity(base.len() * repeats);
    for _ in 0..repeats {
        for t in &base {
            let i = trees.len();
            let tree = if args.shuffle {
                shuffle_linearization(t, &mut source.substream(i as u64, 1))
            } else {
                t.clone()
            };
            let id = format!("{}#{}", t.source_id(), i + 1);
            trees.push(tree.with_source_id(id));
        }
    }
    Ok(trees)
}

fn run_simulate(opts: &GlobalOpts, args: &SimulateArgs) -> CliResult {
    let trees = simulated_trees(args, opts.seed)?;
    let mut out = opts.sink()?;
    match args.emit {
        Emit::Conll => write_conll(&mut out, &trees.iter().map(to_sentence).collect::<Vec<_>>())?,
        Emit::Metrics => write_metrics_tsv(&mut out, &trees.iter().map(SentenceMetrics::of).collect::<Vec<_>>())?,
    }
    out.flush()?;
    Ok(())
}

fn run_validate(opts: &GlobalOpts, inputs: &[PathBuf], debug_dump: Option<&Path>) -> CliResult {
    let corpora = load_all(inputs, &opts.ingest_config()?)?;
    if let Some(path) = debug_dump {
        let mut dump = BufWriter::new(File::create(path)?);
        let outcomes: Vec<_> = corpora.iter().flat_map(|c| c.outcomes.iter().cloned()).collect();
        write_debug_tsv(&mut dump, &outcomes)?;
        dump.flush()?;
    }
    let reports: Vec<_> = corpora.into_iter().map(|c| c.validation).collect();
    let mut out = opts.sink()?;
    match opts.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &reports).map_err(Error::from)?;
            writeln!(out)?;
        }
        Format::Tsv => write_validation_tsv(&mut out, &reports)?,
    }
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    let opts = &cli.opts;
    opts.check()?;
    if let Some(jobs) = opts.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        configure_threads(jobs)?;
    }
    match &cli.command {
        Command::Analyze {
            inputs,
            from_metrics,
            table,
        } => run_analyze(opts, inputs, *from_metrics, *table),
        Command::Metrics { inputs } => run_metrics(opts, inputs),
        Command::Meta { inputs } => run_meta(opts, inputs),
        Command::Simulate(args) => run_simulate(opts, args),
        Command::Validate { inputs, debug_dump } => run_validate(opts, inputs, debug_dump.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("DEPCROSS_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("depcross: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
