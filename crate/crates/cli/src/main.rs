//! `nlpl`: drives corpus ingestion, stream planning, batch building and
//! evaluation from one JSON config.
//!
//! Exit codes: 0 on success, 2 for usage or configuration errors, 3 for data
//! errors.

use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nlpl_core::codegraph::{extract_dataflow, parse, pretty_print};
use nlpl_core::corpus::{self, bundled_profiles, identify_lang, CorpusReader};
use nlpl_core::metrics::{evaluate, Metric};
use nlpl_core::objectives::{translate_prompt, REPAIR_PROMPT};
use nlpl_core::pipeline::{run_build, PipelineConfig, PipelineError};
use nlpl_core::sampler::StreamPlan;
use nlpl_core::tokenizer::{decode, encode, train_vocab, SubwordVocabulary};

#[derive(Parser)]
#[command(name = "nlpl", version, about = "NL/PL pre-training data pipeline and metrics")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Pipeline config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[arg(long, global = true)]
    vocab: Option<PathBuf>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Overrides both the config and EC_SEED.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    max_len: Option<usize>,
    #[arg(long, global = true)]
    task_mix: Option<f64>,
    #[arg(long, global = true)]
    sep_mode: bool,
    /// Do everything except writing files.
    #[arg(long, global = true)]
    dry_run: bool,
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Per-corpus sample counts and shares within each sampling group.
    Stats,
    /// Count the valid records of every manifest corpus and store the counts.
    Ingest,
    /// Compute rebalanced sampling probabilities and write the stream plan.
    Plan {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        epoch_size: Option<u64>,
    },
    /// Build pre-training examples.
    Build {
        /// Plan file; computed from the manifest when absent.
        #[arg(long)]
        plan: Option<PathBuf>,
        /// Number of examples (overrides the plan's epoch size).
        #[arg(short = 'n', long)]
        num_examples: Option<u64>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        jsonl: Option<PathBuf>,
        #[arg(long)]
        binary: Option<PathBuf>,
    },
    /// Score hypotheses against references.
    Eval(EvalArgs),
    /// Print a fine-tuning prompt prefix.
    Prompts {
        task: String,
        #[arg(long)]
        src: Option<String>,
        #[arg(long)]
        tgt: Option<String>,
    },
    /// Encode a text file to ids or decode an id file to text.
    Tokenize {
        #[arg(value_enum)]
        mode: TokenizeMode,
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Identify the natural language of a text.
    IdentifyLang {
        /// Text file; standard input when absent.
        input: Option<PathBuf>,
        #[arg(long)]
        text: Option<String>,
    },
    /// Parse Python-subset code and dump its tree or dataflow graph.
    Parse {
        input: PathBuf,
        #[arg(long)]
        dump_ast: bool,
        #[arg(long)]
        dump_dfg: bool,
    },
    /// Train a subword vocabulary from text files.
    TrainVocab {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 2)]
        min_freq: u64,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct EvalArgs {
    /// Hypotheses, one per line, newlines inside code written as `\n`.
    #[arg(long, requires = "refs", conflicts_with = "pairs")]
    hyps: Option<PathBuf>,
    #[arg(long, requires = "hyps")]
    refs: Option<PathBuf>,
    /// JSONL with `{"hyp": ..., "ref": ...}` per line.
    #[arg(long)]
    pairs: Option<PathBuf>,
    /// Comma-separated: bleu, chrf, rouge_l, em, codebleu.
    #[arg(long, default_value = "bleu,chrf,rouge_l,em")]
    metrics: String,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TokenizeMode {
    Encode,
    Decode,
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn usage(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 2,
        error: error.into(),
    }
}

fn data(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 3,
        error: error.into(),
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        if e.is_usage() {
            usage(e)
        } else {
            data(e)
        }
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn load_config(g: &GlobalArgs) -> Result<PipelineConfig> {
    let mut cfg = match &g.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    cfg.apply_env()?;
    // Paths given on the command line are relative to the working directory.
    let cwd = |p: &PathBuf| std::env::current_dir().map(|d| d.join(p)).unwrap_or(p.clone());
    if let Some(p) = &g.manifest {
        cfg.manifest = Some(cwd(p));
    }
    if let Some(p) = &g.vocab {
        cfg.vocab = Some(cwd(p));
    }
    if let Some(a) = g.alpha {
        cfg.alpha = a;
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(m) = g.max_len {
        cfg.max_len = m;
    }
    if let Some(t) = g.task_mix {
        cfg.task_mix = t;
    }
    if g.sep_mode {
        cfg.sep_mode = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_output(path: &Path, contents: &[u8], dry_run: bool) -> Result<()> {
    if dry_run {
        log::info!("dry run: not writing {}", path.display());
        return Ok(());
    }
    fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(data)
}

fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(usage)
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    match cli.command {
        Command::Stats => cmd_stats(&load_config(g)?),
        Command::Ingest => cmd_ingest(&load_config(g)?, g.dry_run),
        Command::Plan { out, epoch_size } => cmd_plan(load_config(g)?, out, epoch_size, g.dry_run),
        Command::Build {
            plan,
            num_examples,
            workers,
            jsonl,
            binary,
        } => {
            let mut cfg = load_config(g)?;
            if jsonl.is_some() {
                cfg.output.jsonl = jsonl;
            }
            if binary.is_some() {
                cfg.output.binary = binary;
            }
            cmd_build(&cfg, plan, num_examples, workers, g.dry_run)
        }
        Command::Eval(args) => cmd_eval(&load_config(g)?, args, g.dry_run),
        Command::Prompts { task, src, tgt } => cmd_prompts(&task, src, tgt),
        Command::Tokenize { mode, input, output } => cmd_tokenize(&load_config(g)?, mode, &input, output, g.dry_run),
        Command::IdentifyLang { input, text } => cmd_identify_lang(input, text),
        Command::Parse {
            input,
            dump_ast,
            dump_dfg,
        } => cmd_parse(&input, dump_ast, dump_dfg),
        Command::TrainVocab {
            inputs,
            size,
            min_freq,
            out,
        } => {
            let texts = inputs.iter().map(|p| read_input(p)).collect::<Result<Vec<_>>>()?;
            let vocab = train_vocab(&texts, size, min_freq).map_err(usage)?;
            write_output(&out, vocab.to_text().as_bytes(), g.dry_run)?;
            println!("trained {} pieces", vocab.len());
            Ok(())
        }
    }
}

fn cmd_stats(cfg: &PipelineConfig) -> Result<()> {
    let manifest = cfg.load_manifest()?;
    let rows = corpus::stats(&manifest).map_err(|e| PipelineError::from(e))?;
    let mut out = io::stdout().lock();
    let _ = writeln!(out, "{:<24} {:<10} {:<10} {:>14} {:>9}", "corpus", "group", "lang", "samples", "percent");
    for r in rows {
        let _ = writeln!(
            out,
            "{:<24} {:<10} {:<10} {:>14} {:>8.2}%",
            r.corpus_id, r.group, r.lang, r.sample_count, r.percentage
        );
    }
    Ok(())
}

fn cmd_ingest(cfg: &PipelineConfig, dry_run: bool) -> Result<()> {
    let path = cfg.manifest_path()?;
    let mut manifest = cfg.load_manifest()?;
    let entries = manifest.entries.clone();
    for e in &entries {
        let file = manifest.resolve(e);
        let mut reader = CorpusReader::open(&file, e.kind).map_err(data)?;
        let mut count = 0u64;
        for rec in reader.by_ref() {
            rec.map_err(data)?;
            count += 1;
        }
        let st = reader.stats();
        println!(
            "{}: {} accepted, {} malformed, {} duplicate lines",
            e.corpus_id, st.accepted, st.malformed, st.duplicate_lines
        );
        manifest.set_count(&e.corpus_id, count).map_err(data)?;
    }
    if !dry_run {
        manifest.save(&path).map_err(data)?;
    }
    Ok(())
}

fn cmd_plan(mut cfg: PipelineConfig, out: Option<PathBuf>, epoch_size: Option<u64>, dry_run: bool) -> Result<()> {
    if let Some(n) = epoch_size {
        cfg.epoch_size = n;
    }
    let manifest = cfg.load_manifest()?;
    let plan = cfg.plan(&manifest)?;
    println!("{:<6} {:<24} {:>10}", "group", "corpus", "q");
    for (name, dist) in [("NL", &plan.nl), ("PL", &plan.pl)] {
        for (id, q) in dist {
            println!("{name:<6} {id:<24} {q:>10.6}");
        }
    }
    let target = out.or_else(|| cfg.output.plan.as_ref().map(|p| cfg.resolve(p)));
    match target {
        Some(p) => write_output(&p, plan.to_json().as_bytes(), dry_run),
        None => Ok(()),
    }
}

fn cmd_build(
    cfg: &PipelineConfig,
    plan_path: Option<PathBuf>,
    num: Option<u64>,
    workers: usize,
    dry_run: bool,
) -> Result<()> {
    let mut plan = match plan_path {
        Some(p) => StreamPlan::load(&p).map_err(|e| usage(PipelineError::from(e)))?,
        None => cfg.plan(&cfg.load_manifest()?)?,
    };
    if let Some(n) = num {
        if n == 0 {
            return Err(usage(anyhow!("--num-examples must be positive")));
        }
        plan.epoch_size = n;
    }
    if plan.seed != cfg.seed {
        log::info!("using plan seed {} (config seed {})", plan.seed, cfg.seed);
    }
    let summary = run_build(cfg, &plan, workers, dry_run)?;
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    println!("{json}");
    Ok(())
}

/// Undoes the line escaping of hypothesis/reference files.
fn unescape_line(line: &str) -> String {
    let mut out = String::with_capacity(line.len());
    let mut chars = line.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some('t') => out.push('\t'),
            Some('\\') => out.push('\\'),
            Some(other) => {
                out.push('\\');
                out.push(other);
            }
            None => out.push('\\'),
        }
    }
    out
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    Ok(read_input(path)?.lines().map(unescape_line).collect())
}

fn read_pairs(args: &EvalArgs) -> Result<Vec<(String, String)>> {
    if let Some(p) = &args.pairs {
        #[derive(serde::Deserialize)]
        struct Pair {
            hyp: String,
            #[serde(rename = "ref")]
            reference: String,
        }
        let text = read_input(p)?;
        return text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                serde_json::from_str::<Pair>(l)
                    .map(|p| (p.hyp, p.reference))
                    .map_err(|e| data(anyhow!("{}:{}: {e}", p.display(), i + 1)))
            })
            .collect();
    }
    let (Some(h), Some(r)) = (&args.hyps, &args.refs) else {
        return Err(usage(anyhow!("give --hyps and --refs, or --pairs")));
    };
    let (hyps, refs) = (read_lines(h)?, read_lines(r)?);
    if hyps.len() != refs.len() {
        return Err(usage(anyhow!(
            "{} has {} lines but {} has {}",
            h.display(),
            hyps.len(),
            r.display(),
            refs.len()
        )));
    }
    Ok(hyps.into_iter().zip(refs).collect())
}

fn cmd_eval(cfg: &PipelineConfig, args: EvalArgs, dry_run: bool) -> Result<()> {
    let metrics = args
        .metrics
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Metric>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(usage)?;
    if metrics.is_empty() {
        return Err(usage(anyhow!("no metrics requested")));
    }
    let pairs = read_pairs(&args)?;
    if pairs.is_empty() {
        return Err(usage(anyhow!("no hypothesis/reference pairs")));
    }
    let report = evaluate(&pairs, &metrics, &cfg.metrics, args.workers).map_err(usage)?;
    let mut json = report.to_json();
    json.push('\n');
    let target = args.out.or_else(|| cfg.output.report.as_ref().map(|p| cfg.resolve(p)));
    match target {
        Some(p) => write_output(&p, json.as_bytes(), dry_run),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn cmd_prompts(task: &str, src: Option<String>, tgt: Option<String>) -> Result<()> {
    let prompt = match task {
        "repair" => REPAIR_PROMPT.to_string(),
        "translate" => {
            let (Some(s), Some(t)) = (src, tgt) else {
                return Err(usage(anyhow!("translate needs --src and --tgt")));
            };
            translate_prompt(&s, &t).map_err(usage)?
        }
        other => return Err(usage(anyhow!("unknown task {other:?}; expected translate or repair"))),
    };
    print!("{prompt}");
    let _ = io::stdout().flush();
    Ok(())
}

fn cmd_tokenize(
    cfg: &PipelineConfig,
    mode: TokenizeMode,
    input: &Path,
    output: Option<PathBuf>,
    dry_run: bool,
) -> Result<()> {
    let vocab: SubwordVocabulary = cfg.load_vocab()?;
    let text = read_input(input)?;
    let bytes = match mode {
        TokenizeMode::Encode => {
            let ids = encode(&text, &vocab).ids;
            let mut s = ids.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
            s.push('\n');
            s.into_bytes()
        }
        TokenizeMode::Decode => {
            let ids = text
                .split_whitespace()
                .map(|t| t.parse::<u32>().map_err(|_| data(anyhow!("bad token id {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            decode(&ids, &vocab).map_err(data)?.into_bytes()
        }
    };
    match output {
        Some(p) => write_output(&p, &bytes, dry_run),
        None => {
            let mut out = BufWriter::new(io::stdout().lock());
            out.write_all(&bytes).and_then(|_| out.flush()).map_err(data)
        }
    }
}

fn cmd_identify_lang(input: Option<PathBuf>, text: Option<String>) -> Result<()> {
    let text = match (text, input) {
        (Some(t), _) => t,
        (None, Some(p)) => read_input(&p)?,
        (None, None) => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(usage)?;
            s
        }
    };
    let (lang, conf) = identify_lang(&text, bundled_profiles()).map_err(usage)?;
    println!("{lang}\t{conf:.6}");
    Ok(())
}

fn cmd_parse(input: &Path, dump_ast: bool, dump_dfg: bool) -> Result<()> {
    let code = read_input(input)?;
    let outcome = parse(&code);
    let Some(tree) = outcome.tree else {
        let e = outcome.error.expect("failed parse carries an error");
        return Err(data(anyhow!("{}:{e}", input.display())));
    };
    if dump_ast {
        println!("{}", tree.to_sexpr());
    }
    if dump_dfg {
        println!("{}", extract_dataflow(&tree).to_json());
    }
    if !dump_ast && !dump_dfg {
        print!("{}", pretty_print(&tree));
    }
    Ok(())
}
