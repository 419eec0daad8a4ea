//! Command-line surface. Exit codes: 0 success, 1 when any Error-severity
//! outcome was found, 2 for usage, configuration or input failures.

use std::ffi::OsString;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::augment::{augment_corpus, Instructions};
use crate::diagnostics::{classify_failure, lint_corpus, lint_formula, Diagnostic, PredicateDecl};
use crate::extraction::extract;
use crate::jsonl;
use crate::perturb::{build_verifier_dataset, PerturbConfig, PerturbKind, Profile, VerifierInstance};
use crate::pipeline::{build_dataset, error_distribution, map_ordered, PipelineConfig, Record};
use crate::reasoner::{prove, Budget, Outcome};
use crate::syntax::{parse_raw, print, Formula, PrintStyle};
use crate::verify::{
    run_incremental, run_vanilla, AuditEntry, Corrector, ExternalCorrector, ExternalEndpoint, Generator, MockCorrector,
    MockPlayback, RuleCorrector, TokenPolicy, VerifierMode, TOKEN_VAR, URL_VAR,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERRORS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "folforge", version, about = "First-order logic translation toolkit")]
struct Cli {
    /// TOML configuration; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse formulas (one per line) and print them canonically.
    Parse(ParseArgs),
    /// Report taxonomy diagnostics for formulas (one per line).
    Lint(LintArgs),
    /// Decide whether premises entail a conclusion: True, False or Unknown.
    Prove(ProveArgs),
    /// Pull a predicates/premises/conclusion block out of raw model output.
    Extract(ExtractArgs),
    /// Keep records whose translations parse and reproduce the gold label.
    Filter(FilterArgs),
    /// Error-kind histogram over a record corpus.
    Stats(StatsArgs),
    /// Split records into incremental training examples.
    Augment(AugmentArgs),
    /// Build a verifier corpus of perturbed, harvested and correct instances.
    Perturb(PerturbArgs),
    /// Generate translations through a playback script or an HTTP endpoint.
    Infer(InferArgs),
}

#[derive(Args, Debug)]
struct ParseArgs {
    /// Formula file; `-` reads stdin.
    input: PathBuf,
    #[arg(long)]
    ascii: bool,
}

#[derive(Args, Debug)]
struct LintArgs {
    input: PathBuf,
    /// Predicate declarations, one per line.
    #[arg(long)]
    predicates: Option<PathBuf>,
    /// One JSON diagnostic per line instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct ProveArgs {
    #[arg(long)]
    premises: PathBuf,
    /// File holding the conclusion formula.
    #[arg(long)]
    conclusion: PathBuf,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    input: PathBuf,
    /// Number of premises the block must contain.
    #[arg(long)]
    premises: usize,
}

#[derive(Args, Debug)]
struct FilterArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
    /// Reject records with Lint diagnostics too.
    #[arg(long)]
    strict_lints: bool,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct StatsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    json: Option<PathBuf>,
    /// CSV destination; stdout when neither output is given.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    strict_lints: bool,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct AugmentArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
    /// Accepted for symmetry with the other batch commands; output order is fixed.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct PerturbArgs {
    /// Gold seed records (JSONL).
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    profile: Option<Profile>,
    /// Comma-separated kind names overriding the profile.
    #[arg(long, value_delimiter = ',')]
    kinds: Option<Vec<PerturbKind>>,
    #[arg(long)]
    fraction: Option<f64>,
    /// Harvested verifier instances (JSONL) to mix in.
    #[arg(long)]
    harvested: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct InferArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Records with generated predicates and formulas (JSONL).
    #[arg(long)]
    out: PathBuf,
    /// Scripted outputs, lines of {"id", "outputs": [...]}; otherwise the
    /// configured HTTP endpoint is used.
    #[arg(long)]
    playback: Option<PathBuf>,
    #[arg(long)]
    mode: Option<VerifierMode>,
    /// Generate each record in one call instead of stepwise.
    #[arg(long)]
    vanilla: bool,
    #[arg(long)]
    audit: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrectorChoice {
    /// Accepts everything.
    #[default]
    None,
    Rule,
    External,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifierSection {
    pub mode: VerifierMode,
    pub predicate: CorrectorChoice,
    pub fol: CorrectorChoice,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EndpointSection {
    /// Falls back to the `FOLFORGE_GEN_URL` environment variable.
    pub url: Option<String>,
    pub token: Option<String>,
    pub timeout_ms: u64,
    pub verifier_url: Option<String>,
}

impl Default for EndpointSection {
    fn default() -> Self {
        EndpointSection {
            url: None,
            token: None,
            timeout_ms: 60_000,
            verifier_url: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbSection {
    pub perturbed_fraction: Option<f64>,
    pub profile: Option<Profile>,
    pub kinds: Option<Vec<PerturbKind>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineSection {
    pub strict_lints: bool,
    pub workers: Option<usize>,
}

/// Experiment bundle read from `--config`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub reasoner: Budget,
    pub tokens: TokenPolicy,
    pub verifier: VerifierSection,
    pub endpoint: EndpointSection,
    pub perturb: PerturbSection,
    pub pipeline: PipelineSection,
    pub instructions: Instructions,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Config, String> {
        let cfg: Config = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        self.reasoner.validate()?;
        self.tokens.validate()?;
        if self.pipeline.workers == Some(0) {
            return Err("pipeline.workers must be positive".into());
        }
        if self.endpoint.timeout_ms == 0 {
            return Err("endpoint.timeout_ms must be positive".into());
        }
        Ok(())
    }
}

/// Failure that ends a command before it produces its result.
#[derive(Debug)]
struct Usage(String);

impl<E: Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

type CmdResult = Result<i32, Usage>;

fn read_text(path: &Path) -> Result<String, Usage> {
    if path == Path::new("-") {
        return Ok(std::io::read_to_string(std::io::stdin())?);
    }
    std::fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))
}

/// Nonblank lines that are not `#` comments, with 1-based line numbers.
fn formula_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect()
}

fn parse_line(line: &str) -> Result<Formula, Diagnostic> {
    parse_raw(line).map_err(|e| classify_failure(line, &e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Usage> {
    jsonl::write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n")
    })?;
    Ok(())
}

fn workers(flag: Option<usize>, cfg: &Config) -> Result<usize, Usage> {
    match flag.or(cfg.pipeline.workers).unwrap_or(1) {
        0 => Err(Usage("--workers must be positive".into())),
        n => Ok(n),
    }
}

fn cmd_parse(a: &ParseArgs) -> CmdResult {
    let text = read_text(&a.input)?;
    let style = if a.ascii {
        PrintStyle::Ascii
    } else {
        PrintStyle::Unicode
    };
    let mut code = EXIT_OK;
    for (n, line) in formula_lines(&text) {
        match parse_line(line) {
            Ok(f) => println!("{}", print(&f, style)),
            Err(d) => {
                println!("{n}: {d}");
                code = EXIT_ERRORS;
            }
        }
    }
    Ok(code)
}

fn cmd_lint(a: &LintArgs) -> CmdResult {
    let text = read_text(&a.input)?;
    let decls = match &a.predicates {
        Some(p) => {
            let t = read_text(p)?;
            let mut out = Vec::new();
            for (n, l) in formula_lines(&t) {
                out.push(PredicateDecl::parse(l).map_err(|d| Usage(format!("{}:{n}: {d}", p.display())))?);
            }
            out
        }
        None => Vec::new(),
    };
    let mut found: Vec<(usize, Diagnostic)> = Vec::new();
    let mut formulas = Vec::new();
    let mut origin = Vec::new();
    for (n, line) in formula_lines(&text) {
        match parse_line(line) {
            Ok(f) => {
                found.extend(lint_formula(&f).into_iter().map(|d| (n, d)));
                formulas.push(f);
                origin.push(n);
            }
            Err(d) => found.push((n, d)),
        }
    }
    // Corpus diagnostics are attributed to the first line mentioning their subject.
    for d in lint_corpus(&formulas, &decls) {
        let subject = d.subject.clone().unwrap_or_default();
        let names: Vec<&str> = subject.split('/').collect();
        let line = formulas
            .iter()
            .position(|f| {
                let symbols = f.symbols();
                names.iter().any(|n| symbols.contains(*n))
            })
            .map_or(0, |i| origin[i]);
        found.push((line, d));
    }
    found.sort_by_key(|(n, d)| (*n, d.span.start));
    let mut code = EXIT_OK;
    for (n, d) in &found {
        if d.is_error() {
            code = EXIT_ERRORS;
        }
        if a.json {
            let mut v = serde_json::to_value(d)?;
            v["line"] = (*n).into();
            println!("{v}");
        } else {
            println!("{n}: {d}");
        }
    }
    Ok(code)
}

fn cmd_prove(a: &ProveArgs, cfg: &Config) -> CmdResult {
    let parsed = |path: &Path| -> Result<Vec<Formula>, Usage> {
        let text = read_text(path)?;
        formula_lines(&text)
            .into_iter()
            .map(|(n, l)| parse_line(l).map_err(|d| Usage(format!("{}:{n}: {d}", path.display()))))
            .collect()
    };
    let premises = parsed(&a.premises)?;
    let conclusion = parsed(&a.conclusion)?;
    let [conclusion] = conclusion.as_slice() else {
        return Err(Usage(format!(
            "{}: expected exactly one formula",
            a.conclusion.display()
        )));
    };
    let outcome = prove(&premises, conclusion, &cfg.reasoner);
    println!("{outcome}");
    if let Outcome::Error(d) = &outcome {
        eprintln!("{d}");
    }
    Ok(if outcome.label().is_some() {
        EXIT_OK
    } else {
        EXIT_ERRORS
    })
}

fn cmd_extract(a: &ExtractArgs) -> CmdResult {
    let raw = read_text(&a.input)?;
    match extract(&raw, a.premises) {
        Ok(t) => {
            println!("{}", t.render());
            Ok(EXIT_OK)
        }
        Err(ds) => {
            for d in ds {
                println!("{d}");
            }
            Ok(EXIT_ERRORS)
        }
    }
}

fn pipeline_config(cfg: &Config, strict: bool, workers_flag: Option<usize>) -> Result<PipelineConfig, Usage> {
    Ok(PipelineConfig {
        budget: cfg.reasoner.clone(),
        strict_lints: strict || cfg.pipeline.strict_lints,
        workers: workers(workers_flag, cfg)?,
    })
}

fn cmd_filter(a: &FilterArgs, cfg: &Config) -> CmdResult {
    let pc = pipeline_config(cfg, a.strict_lints, a.workers)?;
    let records: Vec<Record> = jsonl::read(&a.input)?;
    let report = build_dataset(records, &a.out, &pc)?;
    match &a.report {
        Some(p) => write_json(p, &report)?,
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(EXIT_OK)
}

fn cmd_stats(a: &StatsArgs, cfg: &Config) -> CmdResult {
    let pc = pipeline_config(cfg, a.strict_lints, a.workers)?;
    let records: Vec<Record> = jsonl::read(&a.input)?;
    let h = error_distribution(&records, &pc);
    if let Some(p) = &a.json {
        write_json(p, &h)?;
    }
    if let Some(p) = &a.csv {
        let csv = h.to_csv();
        jsonl::write_atomic(p, |w| w.write_all(csv.as_bytes()))?;
    }
    if a.json.is_none() && a.csv.is_none() {
        print!("{}", h.to_csv());
    }
    Ok(EXIT_OK)
}

fn cmd_augment(a: &AugmentArgs, cfg: &Config) -> CmdResult {
    workers(a.workers, cfg)?;
    let records: Vec<Record> = jsonl::read(&a.input)?;
    let (examples, report) = augment_corpus(records, &cfg.instructions);
    jsonl::write(&a.out, &examples)?;
    match &a.report {
        Some(p) => write_json(p, &report)?,
        None => eprintln!(
            "{} records, {} dropped, {} examples",
            report.records,
            report.dropped_one_to_one + report.dropped_invalid,
            report.examples
        ),
    }
    Ok(EXIT_OK)
}

fn cmd_perturb(a: &PerturbArgs, cfg: &Config) -> CmdResult {
    let defaults = PerturbConfig::default();
    let pc = PerturbConfig {
        perturbed_fraction: a
            .fraction
            .or(cfg.perturb.perturbed_fraction)
            .unwrap_or(defaults.perturbed_fraction),
        profile: a.profile.or(cfg.perturb.profile).unwrap_or_default(),
        kinds: a.kinds.clone().or_else(|| cfg.perturb.kinds.clone()),
        seed: a.seed,
        workers: workers(a.workers, cfg)?,
    };
    let seeds: Vec<Record> = jsonl::read(&a.input)?;
    let harvested: Vec<VerifierInstance> = match &a.harvested {
        Some(p) => jsonl::read(p)?,
        None => Vec::new(),
    };
    let (instances, report) = build_verifier_dataset(&seeds, &harvested, &pc)?;
    jsonl::write(&a.out, &instances)?;
    match &a.report {
        Some(p) => write_json(p, &report)?,
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(EXIT_OK)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PlaybackLine {
    id: String,
    outputs: Vec<String>,
}

#[derive(Serialize)]
struct AuditLine<'a> {
    id: &'a str,
    #[serde(flatten)]
    entry: &'a AuditEntry,
}

fn endpoint(cfg: &Config, url: Option<&String>) -> Result<ExternalEndpoint, Usage> {
    let url = match url {
        Some(u) => u.clone(),
        None => std::env::var(URL_VAR).map_err(|_| Usage(format!("no endpoint: set endpoint.url or {URL_VAR}")))?,
    };
    let token = cfg.endpoint.token.clone().or_else(|| std::env::var(TOKEN_VAR).ok());
    Ok(ExternalEndpoint::new(url)
        .with_token(token)
        .with_timeout(Duration::from_millis(cfg.endpoint.timeout_ms)))
}

fn corrector(choice: CorrectorChoice, cfg: &Config) -> Result<Box<dyn Corrector>, Usage> {
    Ok(match choice {
        CorrectorChoice::None => Box::new(MockCorrector::default()),
        CorrectorChoice::Rule => Box::new(RuleCorrector),
        CorrectorChoice::External => Box::new(ExternalCorrector {
            endpoint: endpoint(cfg, cfg.endpoint.verifier_url.as_ref().or(cfg.endpoint.url.as_ref()))?,
            max_new_tokens: cfg.tokens.default_max_new_tokens,
        }),
    })
}

struct Inferred {
    record: Record,
    audit: Vec<AuditEntry>,
    error: Option<String>,
}

fn cmd_infer(a: &InferArgs, cfg: &Config) -> CmdResult {
    let records: Vec<Record> = jsonl::read(&a.input)?;
    let mode = a.mode.unwrap_or(cfg.verifier.mode);
    let pv = corrector(cfg.verifier.predicate, cfg)?;
    let fv = corrector(cfg.verifier.fol, cfg)?;
    let generators: Vec<Box<dyn Generator>> = match &a.playback {
        Some(p) => {
            let lines: Vec<PlaybackLine> = jsonl::read(p)?;
            let mut by_id: std::collections::BTreeMap<String, Vec<String>> =
                lines.into_iter().map(|l| (l.id, l.outputs)).collect();
            records
                .iter()
                .map(|r| Box::new(MockPlayback::new(by_id.remove(&r.id).unwrap_or_default())) as Box<dyn Generator>)
                .collect()
        }
        None => {
            let ep = endpoint(cfg, cfg.endpoint.url.as_ref())?;
            records
                .iter()
                .map(|_| Box::new(ep.clone()) as Box<dyn Generator>)
                .collect()
        }
    };
    let jobs: Vec<(&Record, &dyn Generator)> = records.iter().zip(generators.iter().map(|g| g.as_ref())).collect();
    let results = map_ordered(&jobs, workers(a.workers, cfg)?, |(rec, generator)| {
        let outcome = if a.vanilla {
            run_vanilla(*generator, rec, &cfg.instructions, &cfg.tokens)
                .map(|t| (t, Vec::new()))
                .map_err(|e| (e.to_string(), Vec::new()))
        } else {
            run_incremental(
                *generator,
                rec,
                mode,
                pv.as_ref(),
                fv.as_ref(),
                &cfg.tokens,
                &cfg.instructions,
            )
            .map(|run| (run.translation, run.audit))
            .map_err(|f| (f.error.to_string(), f.audit))
        };
        let base = Record {
            predicates: None,
            premises_fol: None,
            conclusion_fol: None,
            raw_generation: None,
            ..(*rec).clone()
        };
        match outcome {
            Ok((t, audit)) => Inferred {
                record: base
                    .with_fol(
                        t.premises.iter().map(|p| p.fol.clone()).collect(),
                        t.conclusion.fol.clone(),
                    )
                    .with_predicates(t.predicates.clone()),
                audit,
                error: None,
            },
            Err((e, audit)) => Inferred {
                record: base,
                audit,
                error: Some(e),
            },
        }
    });
    let mut code = EXIT_OK;
    let mut audit_lines = Vec::new();
    let mut out = Vec::new();
    for r in &results {
        if let Some(e) = &r.error {
            eprintln!("{}: {e}", r.record.id);
            code = EXIT_ERRORS;
        } else {
            out.push(r.record.clone());
        }
        audit_lines.extend(r.audit.iter().map(|entry| AuditLine {
            id: &r.record.id,
            entry,
        }));
    }
    jsonl::write(&a.out, &out)?;
    if let Some(p) = &a.audit {
        jsonl::write(p, &audit_lines)?;
    }
    Ok(code)
}

fn load_config(path: Option<&Path>) -> Result<Config, Usage> {
    match path {
        None => Ok(Config::default()),
        Some(p) => Config::from_toml(&read_text(p)?).map_err(|e| Usage(format!("{}: {e}", p.display()))),
    }
}

/// Runs one command line (including the program name) and returns the
/// process exit code.
pub fn run(argv: Vec<OsString>) -> i32 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = load_config(cli.config.as_deref()).and_then(|cfg| match &cli.command {
        Command::Parse(a) => cmd_parse(a),
        Command::Lint(a) => cmd_lint(a),
        Command::Prove(a) => cmd_prove(a, &cfg),
        Command::Extract(a) => cmd_extract(a),
        Command::Filter(a) => cmd_filter(a, &cfg),
        Command::Stats(a) => cmd_stats(a, &cfg),
        Command::Augment(a) => cmd_augment(a, &cfg),
        Command::Perturb(a) => cmd_perturb(a, &cfg),
        Command::Infer(a) => cmd_infer(a, &cfg),
    });
    match result {
        Ok(code) => code,
        Err(Usage(msg)) => {
            eprintln!("folforge: {msg}");
            EXIT_USAGE
        }
    }
}
