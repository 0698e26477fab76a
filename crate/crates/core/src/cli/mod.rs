//! The `intent-miner` command line: one binary, one subcommand per pipeline step.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 I/O error.

mod config;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

pub use config::{RunConfig, CONFIG_ENV};

use crate::corpus::{generate_synthetic, load_tickets, save_tickets, GeneratorSpec, TicketCollection};
use crate::demo;
use crate::embeddings::{cosine_similarity, load_model, save_model, train_with_stats};
use crate::error::{Error, Result};
use crate::eval::{compare_models, evaluate_with, load_labels, load_report, save_labels, save_report};
use crate::intent::{embed_taxonomy, load_taxonomy, Mapper, RankingRecord};
use crate::preprocess::{
    load_patterns, mapping_tokens_of, mine_patterns, run_pipeline, save_patterns, PatternLibrary, PipelineMode,
};
use crate::topics::{fit_lda, grid_search, load_lda, log_likelihood, render_report, save_lda, BowCorpus};

#[derive(Debug, Parser)]
#[command(
    name = "intent-miner",
    version,
    about = "Mine intents from support tickets: embeddings, topics and intent ranking",
    arg_required_else_help = true
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Config file of `key = value` lines (default: $INTENT_MINER_CONFIG).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 1 forces sequential execution.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override any config key.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Also write the resolved config to this file.
    #[arg(long, global = true, value_name = "PATH")]
    echo_config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a ticket CSV and print a summary.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        /// Rewrite the tickets in canonical column order.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic ticket corpus.
    GenCorpus(GenArgs),
    /// Print pipeline tokens per ticket, tab separated.
    Preprocess {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "embedding")]
        mode: PipelineMode,
        #[arg(long)]
        patterns: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Collect boilerplate lines shared by many tickets.
    MinePatterns {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        min_df: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train word embeddings on ticket bodies.
    TrainEmbeddings(TrainArgs),
    /// Nearest words of a query word.
    Neighbors {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 7)]
        k: usize,
    },
    /// Cosine similarity of two texts' sentence embeddings.
    SentenceSim {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Fit one LDA model.
    FitLda(LdaArgs),
    /// Held-out perplexity over a grid of K, alpha and beta.
    LdaGrid(GridArgs),
    /// Top keywords and prevalence of every topic.
    TopicsReport {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank intent use cases for every ticket.
    Map {
        #[command(flatten)]
        inputs: MapInputs,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        mapping: MappingArgs,
    },
    /// Top-1 accuracy against a labels CSV.
    Evaluate {
        #[command(flatten)]
        inputs: MapInputs,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        top_k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        mapping: MappingArgs,
    },
    /// Side-by-side accuracy table of several evaluation reports.
    Compare {
        #[arg(long, value_delimiter = ',', required = true)]
        reports: Vec<PathBuf>,
        /// CSV copy of the table.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Generator spec (JSON).
    #[arg(long, required_unless_present = "demo", conflicts_with = "demo")]
    spec: Option<PathBuf>,
    /// Use the bundled support-desk generator.
    #[arg(long)]
    demo: bool,
    /// Number of tickets (overrides the spec).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    /// Write the bundled taxonomy (demo only).
    #[arg(long, requires = "demo")]
    taxonomy_out: Option<PathBuf>,
    /// Labelled held-out tickets to generate (demo only).
    #[arg(long, requires_all = ["demo", "labelled_out", "labels_out"])]
    labelled: Option<usize>,
    #[arg(long)]
    labelled_out: Option<PathBuf>,
    #[arg(long)]
    labels_out: Option<PathBuf>,
    /// Share of noise tokens in labelled tickets.
    #[arg(long, default_value_t = 0.3)]
    label_noise: f64,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    patterns: Option<PathBuf>,
    #[arg(long)]
    arch: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    negatives: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    min_count: Option<u64>,
    #[arg(long)]
    subsample: Option<f64>,
}

#[derive(Debug, Args)]
struct LdaArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    patterns: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    iters: Option<usize>,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long)]
    input: PathBuf,
    /// Grid CSV (`K,alpha,beta,loglik,perplexity`).
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    patterns: Option<PathBuf>,
    #[arg(long, value_name = "LIST")]
    k: Option<String>,
    #[arg(long, value_name = "LIST")]
    alpha: Option<String>,
    #[arg(long, value_name = "LIST")]
    beta: Option<String>,
    #[arg(long)]
    split: Option<f64>,
    #[arg(long)]
    iters: Option<usize>,
}

#[derive(Debug, Args)]
struct MapInputs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    taxonomy: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    patterns: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MappingArgs {
    #[arg(long)]
    subject_threshold: Option<f64>,
    #[arg(long)]
    top_n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    min_score: Option<f64>,
    #[arg(long)]
    no_subject_narrowing: bool,
}

type Overrides = Vec<(&'static str, String)>;

fn push<T: ToString>(o: &mut Overrides, key: &'static str, v: &Option<T>) {
    if let Some(v) = v {
        o.push((key, v.to_string()));
    }
}

impl MappingArgs {
    fn overrides(&self, o: &mut Overrides) {
        push(o, "mapping.subject_threshold", &self.subject_threshold);
        push(o, "mapping.top_n", &self.top_n);
        push(o, "mapping.min_score", &self.min_score);
        if self.no_subject_narrowing {
            o.push(("mapping.subject_narrowing", "false".into()));
        }
    }
}

impl Command {
    /// Config keys set by subcommand flags.
    fn overrides(&self) -> Overrides {
        let mut o = Overrides::new();
        match self {
            Command::MinePatterns { min_df, .. } => push(&mut o, "preprocess.min_doc_frequency", min_df),
            Command::TrainEmbeddings(a) => {
                push(&mut o, "embeddings.arch", &a.arch);
                push(&mut o, "embeddings.dim", &a.dim);
                push(&mut o, "embeddings.window", &a.window);
                push(&mut o, "embeddings.negatives", &a.negatives);
                push(&mut o, "embeddings.epochs", &a.epochs);
                push(&mut o, "embeddings.lr", &a.lr);
                push(&mut o, "embeddings.min_count", &a.min_count);
                push(&mut o, "embeddings.subsample", &a.subsample);
            }
            Command::FitLda(a) => {
                push(&mut o, "lda.k", &a.k);
                push(&mut o, "lda.alpha", &a.alpha);
                push(&mut o, "lda.beta", &a.beta);
                push(&mut o, "lda.iterations", &a.iters);
            }
            Command::LdaGrid(a) => {
                push(&mut o, "grid.k", &a.k);
                push(&mut o, "grid.alpha", &a.alpha);
                push(&mut o, "grid.beta", &a.beta);
                push(&mut o, "grid.split", &a.split);
                push(&mut o, "grid.iterations", &a.iters);
            }
            Command::TopicsReport { n, .. } => push(&mut o, "report.keywords", n),
            Command::Map { mapping, .. } => mapping.overrides(&mut o),
            Command::Evaluate { mapping, top_k, .. } => {
                mapping.overrides(&mut o);
                push(&mut o, "eval.top_k", top_k);
            }
            _ => {}
        }
        o
    }
}

/// Defaults, then the config file, then `flags` in order.
pub fn resolve_config(file: Option<&Path>, flags: &[(String, String)]) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = file {
        cfg.apply_file(path)?;
    }
    for (k, v) in flags {
        cfg.set(k, v)?;
    }
    Ok(cfg)
}

fn flag_overrides(cli: &Cli) -> Result<Vec<(String, String)>> {
    let mut flags = Vec::new();
    for kv in &cli.global.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        flags.push((k.trim().to_string(), v.trim().to_string()));
    }
    for (k, v) in cli.command.overrides() {
        flags.push((k.to_string(), v));
    }
    if let Some(s) = cli.global.seed {
        flags.push(("seed".into(), s.to_string()));
    }
    if let Some(t) = cli.global.threads {
        flags.push(("threads".into(), t.to_string()));
    }
    Ok(flags)
}

/// What a command prints.
#[derive(Default)]
struct Output {
    stdout: String,
    stderr: String,
}

/// Runs the command line `args` (program name first) against the process streams.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    dispatch_to(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn dispatch_to<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    1
                }
            };
        }
    };
    match run(&cli, err) {
        Ok(o) => {
            let _ = err.write_all(o.stderr.as_bytes());
            let _ = out.write_all(o.stdout.as_bytes());
            let _ = out.flush();
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_io() {
                2
            } else {
                1
            }
        }
    }
}

fn run(cli: &Cli, err: &mut dyn Write) -> Result<Output> {
    let file = cli
        .global
        .config
        .clone()
        .or_else(|| std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from));
    let cfg = resolve_config(file.as_deref(), &flag_overrides(cli)?)?;
    let echo = cfg.echo();
    let _ = writeln!(err, "# resolved config");
    let _ = err.write_all(echo.as_bytes());
    if let Some(path) = &cli.global.echo_config {
        write_file(path, echo.as_bytes())?;
    }
    if cfg.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
        pool.install(|| execute(&cli.command, &cfg))
    } else {
        execute(&cli.command, &cfg)
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn patterns_of(path: &Option<PathBuf>) -> Result<PatternLibrary> {
    path.as_ref().map_or_else(|| Ok(PatternLibrary::default()), load_patterns)
}

fn docs_of(c: &TicketCollection, mode: PipelineMode, lib: &PatternLibrary) -> Vec<Vec<String>> {
    c.tickets().par_iter().map(|t| run_pipeline(t, mode, lib).tokens).collect()
}

fn execute(command: &Command, cfg: &RunConfig) -> Result<Output> {
    let mut o = Output::default();
    match command {
        Command::Ingest { input, out } => {
            let c = load_tickets(input)?;
            let subjects = c.iter().filter(|t| t.subject.is_some()).count();
            let _ = writeln!(o.stdout, "source\t{}\ntickets\t{}\nwith_subject\t{subjects}", c.source(), c.len());
            if let Some(out) = out {
                save_tickets(out, &c)?;
            }
        }
        Command::GenCorpus(a) => gen_corpus(a, cfg, &mut o)?,
        Command::Preprocess {
            input,
            mode,
            patterns,
            out,
        } => {
            let c = load_tickets(input)?;
            let lib = patterns_of(patterns)?;
            let mut text = String::new();
            for t in c.iter() {
                let p = run_pipeline(t, *mode, &lib);
                let fields = match p.sentences {
                    Some(s) => s.iter().map(|x| x.join(" ")).collect::<Vec<_>>().join("\t"),
                    None => p.tokens.join(" "),
                };
                let _ = writeln!(text, "{}\t{fields}", t.id);
            }
            match out {
                Some(path) => write_file(path, text.as_bytes())?,
                None => o.stdout = text,
            }
        }
        Command::MinePatterns { input, out, .. } => {
            let lib = mine_patterns(&load_tickets(input)?, cfg.min_doc_frequency)?;
            save_patterns(out, &lib)?;
            let _ = writeln!(o.stderr, "{} patterns", lib.patterns().len());
        }
        Command::TrainEmbeddings(a) => {
            let c = load_tickets(&a.input)?;
            let docs = docs_of(&c, PipelineMode::Embedding, &patterns_of(&a.patterns)?);
            let (model, stats) = train_with_stats(&docs, &cfg.training())?;
            save_model(&model, &a.out)?;
            for (i, l) in stats.epoch_losses.iter().enumerate() {
                let _ = writeln!(o.stderr, "epoch {}\tloss {l:.6}", i + 1);
            }
            let _ = writeln!(
                o.stderr,
                "{} words, dim {}, fingerprint {}",
                model.vocabulary().len(),
                model.dim(),
                model.fingerprint()
            );
        }
        Command::Neighbors { model, word, k } => {
            let m = load_model(model)?;
            for (w, s) in m.nearest_neighbors(word, *k)? {
                let _ = writeln!(o.stdout, "{w}\t{s:.6}");
            }
        }
        Command::SentenceSim { model, a, b } => {
            let m = load_model(model)?;
            let embed = |text: &str| {
                m.sentence_embedding(&mapping_tokens_of(text))
                    .ok_or_else(|| Error::invalid(format!("`{text}` has no in-vocabulary token")))
            };
            let s = cosine_similarity(&embed(a)?, &embed(b)?)?;
            let _ = writeln!(o.stdout, "{s:.6}");
        }
        Command::FitLda(a) => {
            let c = load_tickets(&a.input)?;
            let bow = BowCorpus::from_token_docs(&docs_of(&c, PipelineMode::TopicMapping, &patterns_of(&a.patterns)?));
            let model = fit_lda(&bow, cfg.lda_params())?;
            save_lda(&model, &a.out)?;
            let _ = writeln!(o.stderr, "log-likelihood {:.6}", log_likelihood(&model, &bow));
        }
        Command::LdaGrid(a) => {
            let c = load_tickets(&a.input)?;
            let bow = BowCorpus::from_token_docs(&docs_of(&c, PipelineMode::TopicMapping, &patterns_of(&a.patterns)?));
            let result = grid_search(&bow, &cfg.grid_spec())?;
            let mut buf = Vec::new();
            result.write_csv(&mut buf)?;
            write_file(&a.out, &buf)?;
            let b = result.best_row();
            let _ = writeln!(
                o.stdout,
                "best\tK={}\talpha={}\tbeta={}\tperplexity={:.6}",
                b.k, b.alpha, b.beta, b.perplexity
            );
        }
        Command::TopicsReport { model, out, .. } => {
            let text = render_report(&load_lda(model)?, cfg.report_keywords)?;
            match out {
                Some(path) => write_file(path, text.as_bytes())?,
                None => o.stdout = text,
            }
        }
        Command::Map { inputs, out, .. } => {
            let model = load_model(&inputs.model)?;
            let etx = embed_taxonomy(&load_taxonomy(&inputs.taxonomy)?, &model)?;
            let c = load_tickets(&inputs.input)?;
            let mapper = Mapper::new(&model, &etx, cfg.mapping.clone())?.with_patterns(patterns_of(&inputs.patterns)?);
            let mut text = String::new();
            let mut failed = 0;
            for (t, r) in c.iter().zip(mapper.rank_batch(&c)) {
                if let Err(e) = &r {
                    failed += 1;
                    let _ = writeln!(o.stderr, "ticket {}: {e}", t.id);
                }
                text.push_str(&RankingRecord::new(&t.id, &cfg.mapping, &r).to_json_line());
                text.push('\n');
            }
            write_file(out, text.as_bytes())?;
            let _ = writeln!(o.stderr, "{} tickets mapped, {failed} failed", c.len());
        }
        Command::Evaluate {
            inputs, labels, out, ..
        } => {
            let model = load_model(&inputs.model)?;
            let etx = embed_taxonomy(&load_taxonomy(&inputs.taxonomy)?, &model)?;
            let c = load_tickets(&inputs.input)?;
            let labels = load_labels(labels)?;
            let lib = patterns_of(&inputs.patterns)?;
            let report = evaluate_with(&labels, &c, &etx, &model, &cfg.mapping, cfg.eval_top_k, lib)?;
            match out {
                Some(path) => save_report(path, &report)?,
                None => o.stdout = report.to_csv_string(),
            }
            let _ = writeln!(
                o.stderr,
                "top-1 accuracy {:.4} over {} tickets",
                report.micro_accuracy(),
                report.total()
            );
        }
        Command::Compare { reports, out } => {
            let loaded = reports.iter().map(load_report).collect::<Result<Vec<_>>>()?;
            let table = compare_models(&loaded)?;
            o.stdout = table.to_text();
            if let Some(path) = out {
                write_file(path, table.to_csv().as_bytes())?;
            }
        }
    }
    Ok(o)
}

fn gen_corpus(a: &GenArgs, cfg: &RunConfig, o: &mut Output) -> Result<()> {
    let mut spec = match &a.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            serde_json::from_str::<GeneratorSpec>(&text)?
        }
        None => demo::training_spec(10_000, cfg.seed),
    };
    if let Some(n) = a.n {
        spec.n_tickets = n;
    }
    let c = generate_synthetic(&spec)?;
    save_tickets(&a.out, &c)?;
    let _ = writeln!(o.stderr, "{} tickets written", c.len());
    if let Some(path) = &a.taxonomy_out {
        write_file(path, demo::taxonomy().to_json().as_bytes())?;
    }
    if let (Some(n), Some(tickets), Some(labels)) = (a.labelled, &a.labelled_out, &a.labels_out) {
        let (c, l) = demo::labelled_tickets(n, a.label_noise, cfg.seed.wrapping_add(1))?;
        save_tickets(tickets, &c)?;
        save_labels(labels, &l)?;
    }
    Ok(())
}
