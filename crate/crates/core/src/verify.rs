//! Inference harness: whole-translation (vanilla) and stepwise (incremental)
//! generation through a pluggable [`Generator`], with predicate and FOL
//! verification either online (inside the step loop) or offline (a post-pass).
//!
//! Every generation and verification is recorded in an audit log; [`replay`]
//! re-runs a record from its log alone and checks that it reproduces it.

use std::collections::BTreeMap;
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::augment::{render_input, render_prompt, Instructions};
use crate::diagnostics::{lint_corpus, lint_formula, Diagnostic, ErrorKind, PredicateDecl, Severity};
use crate::extraction::{extract, extract_formula, extract_predicates, render_predicates, Pair, Translation};
use crate::perturb::{fol_context, predicate_context, VerifierTask, CORRECT};
use crate::pipeline::Record;
use crate::syntax::{parse, print, Formula, PrintStyle, Quantified, Term};

pub const URL_VAR: &str = "FOLFORGE_GEN_URL";
pub const TOKEN_VAR: &str = "FOLFORGE_GEN_TOKEN";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("playback script exhausted after {0} outputs")]
    ScriptExhausted(usize),
    #[error("endpoint request failed: {0}")]
    Http(String),
    #[error("endpoint returned an unexpected body: {0}")]
    Protocol(String),
    #[error("{URL_VAR} is not set")]
    MissingUrl,
}

pub trait Generator: Sync {
    fn generate(&self, prompt: &str, max_new_tokens: usize) -> Result<String, GenError>;
}

/// Returns scripted outputs in order and records every request.
#[derive(Debug, Default)]
pub struct MockPlayback {
    outputs: Vec<String>,
    calls: Mutex<Vec<(String, usize)>>,
}

impl MockPlayback {
    pub fn new<S: Into<String>>(outputs: impl IntoIterator<Item = S>) -> Self {
        MockPlayback {
            outputs: outputs.into_iter().map(Into::into).collect(),
            calls: Mutex::new(Vec::new()),
        }
    }

    /// Prompts and token budgets received so far.
    pub fn calls(&self) -> Vec<(String, usize)> {
        self.calls.lock().expect("unpoisoned").clone()
    }
}

impl Generator for MockPlayback {
    fn generate(&self, prompt: &str, max_new_tokens: usize) -> Result<String, GenError> {
        let mut calls = self.calls.lock().expect("unpoisoned");
        let i = calls.len();
        calls.push((prompt.to_string(), max_new_tokens));
        self.outputs
            .get(i)
            .cloned()
            .ok_or(GenError::ScriptExhausted(self.outputs.len()))
    }
}

#[derive(Serialize)]
struct WireRequest<'a> {
    prompt: &'a str,
    max_new_tokens: usize,
}

#[derive(Deserialize)]
struct WireResponse {
    text: String,
}

/// JSON-over-HTTP text generation service. Plain `http://` only.
#[derive(Clone, Debug)]
pub struct ExternalEndpoint {
    pub url: String,
    pub token: Option<String>,
    pub timeout: Duration,
}

impl ExternalEndpoint {
    pub fn new(url: impl Into<String>) -> Self {
        ExternalEndpoint {
            url: url.into(),
            token: None,
            timeout: DEFAULT_TIMEOUT,
        }
    }

    pub fn from_env() -> Result<Self, GenError> {
        let url = std::env::var(URL_VAR).map_err(|_| GenError::MissingUrl)?;
        Ok(ExternalEndpoint {
            token: std::env::var(TOKEN_VAR).ok(),
            ..ExternalEndpoint::new(url)
        })
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn with_token(mut self, token: Option<String>) -> Self {
        self.token = token;
        self
    }
}

impl Generator for ExternalEndpoint {
    fn generate(&self, prompt: &str, max_new_tokens: usize) -> Result<String, GenError> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(self.timeout))
            .http_status_as_error(true)
            .build()
            .into();
        let mut req = agent.post(&self.url);
        if let Some(t) = &self.token {
            req = req.header("Authorization", format!("Bearer {t}"));
        }
        let mut resp = req
            .send_json(WireRequest { prompt, max_new_tokens })
            .map_err(|e| GenError::Http(e.to_string()))?;
        let body: WireResponse = resp
            .body_mut()
            .read_json()
            .map_err(|e| GenError::Protocol(e.to_string()))?;
        Ok(body.text)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Correct,
    Replace(String),
    /// The checker found errors it could not fix; the candidate stands.
    NotRepaired,
}

pub trait Corrector: Sync {
    fn correct(&self, task: VerifierTask, context: &str) -> Result<Verdict, GenError>;
}

/// Lines under each `Header:` of a verifier context.
fn sections(context: &str) -> BTreeMap<&str, Vec<&str>> {
    const HEADERS: [&str; 5] = ["Premises:", "Conclusion:", "Predicates:", "FOL:", "NL:"];
    let mut out: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut current = "";
    for line in context.lines() {
        if let Some(h) = HEADERS.iter().find(|h| line.trim() == **h) {
            current = h.trim_end_matches(':');
            out.entry(current).or_default();
        } else if !current.is_empty() && !line.trim().is_empty() {
            out.entry(current).or_default().push(line);
        }
    }
    out
}

/// The text under verification: the predicate block or the single formula.
pub fn candidate_of(task: VerifierTask, context: &str) -> String {
    let s = sections(context);
    let key = match task {
        VerifierTask::Predicate => "Predicates",
        VerifierTask::Fol => "FOL",
    };
    s.get(key).map(|l| l.join("\n")).unwrap_or_default()
}

/// Replies from a lookup keyed by candidate text; anything else is correct.
#[derive(Clone, Debug, Default)]
pub struct MockCorrector {
    pub fixes: BTreeMap<String, String>,
}

impl MockCorrector {
    pub fn new<K: Into<String>, V: Into<String>>(fixes: impl IntoIterator<Item = (K, V)>) -> Self {
        MockCorrector {
            fixes: fixes.into_iter().map(|(k, v)| (k.into(), v.into())).collect(),
        }
    }
}

impl Corrector for MockCorrector {
    fn correct(&self, task: VerifierTask, context: &str) -> Result<Verdict, GenError> {
        Ok(match self.fixes.get(&candidate_of(task, context)) {
            Some(r) => Verdict::Replace(r.clone()),
            None => Verdict::Correct,
        })
    }
}

/// Diagnostics-driven repairs; see [`rule_correct`].
#[derive(Clone, Copy, Debug, Default)]
pub struct RuleCorrector;

impl Corrector for RuleCorrector {
    fn correct(&self, task: VerifierTask, context: &str) -> Result<Verdict, GenError> {
        Ok(rule_correct(task, context))
    }
}

/// Sends the context as the prompt; a reply of `correct` accepts.
#[derive(Clone, Debug)]
pub struct ExternalCorrector {
    pub endpoint: ExternalEndpoint,
    pub max_new_tokens: usize,
}

impl Corrector for ExternalCorrector {
    fn correct(&self, _task: VerifierTask, context: &str) -> Result<Verdict, GenError> {
        let text = self.endpoint.generate(context, self.max_new_tokens)?;
        let text = text.trim();
        Ok(if text.eq_ignore_ascii_case(CORRECT) {
            Verdict::Correct
        } else {
            Verdict::Replace(text.to_string())
        })
    }
}

fn declared(context: &str) -> Vec<PredicateDecl> {
    sections(context)
        .get("Predicates")
        .map(|ls| ls.iter().filter_map(|l| PredicateDecl::parse(l).ok()).collect())
        .unwrap_or_default()
}

/// Error-severity diagnostics of a candidate formula; unparseable text
/// counts as worse than any parseable text.
fn fol_errors(text: &str, decls: &[PredicateDecl]) -> usize {
    match parse(text) {
        Err(_) => usize::MAX,
        Ok(f) => {
            let lints = lint_formula(&f);
            let corpus = lint_corpus(std::slice::from_ref(&f), decls);
            lints
                .iter()
                .chain(&corpus)
                .filter(|d| d.severity == Severity::Error)
                .count()
        }
    }
}

fn balance_parens(text: &str) -> String {
    let mut depth = 0usize;
    let mut out = String::with_capacity(text.len() + 2);
    for c in text.chars() {
        match c {
            '(' => depth += 1,
            ')' if depth == 0 => continue,
            ')' => depth -= 1,
            _ => {}
        }
        out.push(c);
    }
    out.extend(std::iter::repeat_n(')', depth));
    out
}

fn repair_syntax(text: &str) -> Option<String> {
    let mut text = text.trim().to_string();
    for _ in 0..2 {
        let d: Diagnostic = match parse(&text) {
            Ok(_) => return Some(text),
            Err(d) => d,
        };
        text = match d.kind {
            ErrorKind::ParenthesisImbalance => balance_parens(&text),
            ErrorKind::CompletionError if d.span.start > 0 => text[..d.span.start].trim_end().to_string(),
            _ => return None,
        };
    }
    parse(&text).is_ok().then_some(text)
}

fn majority_arities(decls: &[PredicateDecl]) -> BTreeMap<&str, usize> {
    let mut counts: BTreeMap<&str, Vec<(usize, usize)>> = BTreeMap::new();
    for d in decls {
        let entry = counts.entry(d.name.as_str()).or_default();
        match entry.iter_mut().find(|(a, _)| *a == d.arity) {
            Some((_, n)) => *n += 1,
            None => entry.push((d.arity, 1)),
        }
    }
    counts
        .into_iter()
        .map(|(name, arities)| {
            let best = arities.iter().map(|(_, n)| *n).max().unwrap_or(0);
            let arity = arities.iter().find(|(_, n)| *n == best).map_or(0, |(a, _)| *a);
            (name, arity)
        })
        .collect()
}

fn fix_arities(f: &Formula, target: &BTreeMap<&str, usize>, scope: &mut Vec<String>) -> Formula {
    match f {
        Formula::Atom(a) => {
            let Some(&want) = target.get(a.predicate.as_str()) else {
                return f.clone();
            };
            let mut args = a.args.clone();
            if args.len() > want {
                args.truncate(want);
            } else if args.len() < want {
                let Some(pad) = scope.first() else {
                    return f.clone();
                };
                args.resize(want, Term::var(pad.clone()));
            }
            Formula::atom(a.predicate.clone(), args)
        }
        Formula::Not(g) => Formula::not(fix_arities(g, target, scope)),
        Formula::Binary(op, l, r) => Formula::binary(*op, fix_arities(l, target, scope), fix_arities(r, target, scope)),
        Formula::Quantified(q) => {
            let before = scope.len();
            scope.extend(q.vars.iter().cloned());
            let body = fix_arities(&q.body, target, scope);
            scope.truncate(before);
            Formula::Quantified(Quantified {
                body: Box::new(body),
                ..q.clone()
            })
        }
    }
}

fn rule_correct_fol(context: &str) -> Verdict {
    let candidate = candidate_of(VerifierTask::Fol, context);
    let decls = declared(context);
    let before = fol_errors(&candidate, &decls);
    if before == 0 {
        return Verdict::Correct;
    }
    let Some(text) = repair_syntax(&candidate) else {
        return Verdict::NotRepaired;
    };
    let f = parse(&text).expect("repair_syntax returns parseable text");
    let f = fix_arities(&f, &majority_arities(&decls), &mut Vec::new()).universal_closure();
    let repaired = print(&f, PrintStyle::Unicode);
    if fol_errors(&repaired, &decls) < before {
        Verdict::Replace(repaired)
    } else {
        Verdict::NotRepaired
    }
}

fn rule_correct_predicates(context: &str) -> Verdict {
    let lines: Vec<&str> = sections(context).get("Predicates").cloned().unwrap_or_default();
    let Some(decls) = lines
        .iter()
        .map(|l| PredicateDecl::parse(l).ok())
        .collect::<Option<Vec<_>>>()
    else {
        return Verdict::NotRepaired;
    };
    let target = majority_arities(&decls);
    let mut kept: Vec<&PredicateDecl> = Vec::new();
    for d in &decls {
        if target[d.name.as_str()] == d.arity && !kept.iter().any(|k| k.name == d.name) {
            kept.push(d);
        }
    }
    if kept.len() == decls.len() {
        Verdict::Correct
    } else {
        Verdict::Replace(kept.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))
    }
}

/// Rule-based verifier. FOL candidates are repaired by balancing
/// parentheses, dropping trailing prose, unifying arities to the declared
/// majority and closing free variables universally. A replacement always has
/// strictly fewer Error diagnostics than the candidate. Predicate lists keep
/// one declaration per name, at the majority arity.
pub fn rule_correct(task: VerifierTask, context: &str) -> Verdict {
    match task {
        VerifierTask::Fol => rule_correct_fol(context),
        VerifierTask::Predicate => rule_correct_predicates(context),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerifierMode {
    #[default]
    None,
    /// Predicates verified during generation, formulas after it.
    OnOff,
    /// Both verified during generation.
    OnOn,
}

impl std::str::FromStr for VerifierMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(VerifierMode::None),
            "onoff" => Ok(VerifierMode::OnOff),
            "onon" => Ok(VerifierMode::OnOn),
            _ => Err(format!("unknown verifier mode `{s}` (expected none, onoff or onon)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TokenPolicy {
    pub default_max_new_tokens: usize,
    pub short_sentence_word_threshold: usize,
    pub short_budget: usize,
}

impl Default for TokenPolicy {
    fn default() -> Self {
        TokenPolicy {
            default_max_new_tokens: 128,
            short_sentence_word_threshold: 5,
            short_budget: 16,
        }
    }
}

impl TokenPolicy {
    pub fn validate(&self) -> Result<(), String> {
        if self.short_budget < self.default_max_new_tokens {
            Ok(())
        } else {
            Err(format!(
                "short_budget ({}) must be below default_max_new_tokens ({})",
                self.short_budget, self.default_max_new_tokens
            ))
        }
    }

    pub fn budget_for(&self, sentence: &str) -> usize {
        if sentence.split_whitespace().count() < self.short_sentence_word_threshold {
            self.short_budget
        } else {
            self.default_max_new_tokens
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Generate,
    VerifyPredicates,
    VerifyFol,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditVerdict {
    Generated,
    Correct,
    Replaced,
    NotRepaired,
    /// A replacement that failed validation; the candidate was kept.
    InvalidReplacement,
}

/// One generator or verifier call. `raw_output` is the generator's text, or
/// the candidate under verification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub step: usize,
    pub phase: Phase,
    pub prompt_hash: String,
    pub raw_output: String,
    pub verdict: AuditVerdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replacement: Option<String>,
}

pub fn prompt_hash(prompt: &str) -> String {
    hex::encode(Sha256::digest(prompt.as_bytes()))
}

#[derive(Debug, thiserror::Error)]
pub enum InferenceError {
    #[error("generation failed at step {step}: {source}")]
    Generator {
        step: usize,
        #[source]
        source: GenError,
    },
    #[error("extraction failed: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Extraction(Vec<Diagnostic>),
}

/// One generation for the whole record, routed through block extraction.
pub fn run_vanilla(
    generator: &dyn Generator,
    rec: &Record,
    instructions: &Instructions,
    policy: &TokenPolicy,
) -> Result<Translation, InferenceError> {
    let prompt = render_prompt(&instructions.fol, &render_input(&rec.premises, &rec.conclusion), "");
    let budget = policy.default_max_new_tokens * (rec.premises.len() + 2);
    let raw = generator
        .generate(&prompt, budget)
        .map_err(|source| InferenceError::Generator { step: 0, source })?;
    extract(&raw, rec.premises.len()).map_err(InferenceError::Extraction)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Run {
    pub translation: Translation,
    pub audit: Vec<AuditEntry>,
}

#[derive(Debug, thiserror::Error)]
#[error("{error}")]
pub struct RunFailure {
    #[source]
    pub error: InferenceError,
    /// Entries logged before the failure.
    pub audit: Vec<AuditEntry>,
}

struct Harness<'a> {
    generator: &'a dyn Generator,
    pv: &'a dyn Corrector,
    fv: &'a dyn Corrector,
    audit: Vec<AuditEntry>,
}

impl Harness<'_> {
    fn fail(&mut self, error: InferenceError) -> RunFailure {
        RunFailure {
            error,
            audit: std::mem::take(&mut self.audit),
        }
    }

    fn generate(&mut self, step: usize, prompt: &str, budget: usize) -> Result<String, RunFailure> {
        match self.generator.generate(prompt, budget) {
            Ok(raw) => {
                self.audit.push(AuditEntry {
                    step,
                    phase: Phase::Generate,
                    prompt_hash: prompt_hash(prompt),
                    raw_output: raw.clone(),
                    verdict: AuditVerdict::Generated,
                    replacement: None,
                });
                Ok(raw)
            }
            Err(source) => Err(self.fail(InferenceError::Generator { step, source })),
        }
    }

    /// One verdict per candidate. Returns the accepted text.
    fn verify(
        &mut self,
        step: usize,
        task: VerifierTask,
        context: &str,
        candidate: &str,
    ) -> Result<String, RunFailure> {
        let corrector = match task {
            VerifierTask::Predicate => self.pv,
            VerifierTask::Fol => self.fv,
        };
        let verdict = corrector
            .correct(task, context)
            .map_err(|source| self.fail(InferenceError::Generator { step, source }))?;
        let (kind, replacement, accepted) = match verdict {
            Verdict::Correct => (AuditVerdict::Correct, None, candidate.to_string()),
            Verdict::NotRepaired => (AuditVerdict::NotRepaired, None, candidate.to_string()),
            Verdict::Replace(r) => {
                let valid = match task {
                    VerifierTask::Fol => parse(&r).is_ok(),
                    VerifierTask::Predicate => {
                        let lines: Vec<&str> = r.lines().filter(|l| !l.trim().is_empty()).collect();
                        !lines.is_empty() && lines.iter().all(|l| PredicateDecl::parse(l).is_ok())
                    }
                };
                if valid {
                    (AuditVerdict::Replaced, Some(r.clone()), r)
                } else {
                    log::warn!("step {step}: discarding invalid replacement {r:?}");
                    (AuditVerdict::InvalidReplacement, Some(r), candidate.to_string())
                }
            }
        };
        self.audit.push(AuditEntry {
            step,
            phase: match task {
                VerifierTask::Predicate => Phase::VerifyPredicates,
                VerifierTask::Fol => Phase::VerifyFol,
            },
            prompt_hash: prompt_hash(context),
            raw_output: candidate.to_string(),
            verdict: kind,
            replacement,
        });
        Ok(accepted)
    }
}

/// Stepwise generation: predicates first, then one formula per statement,
/// each prompt carrying every accepted output so far. Runs exactly
/// `n + 2` generation steps for `n` premises.
pub fn run_incremental(
    generator: &dyn Generator,
    rec: &Record,
    mode: VerifierMode,
    pv: &dyn Corrector,
    fv: &dyn Corrector,
    policy: &TokenPolicy,
    instructions: &Instructions,
) -> Result<Run, RunFailure> {
    let mut h = Harness {
        generator,
        pv,
        fv,
        audit: Vec::new(),
    };
    let input = render_input(&rec.premises, &rec.conclusion);
    let n = rec.premises.len();

    let raw = h.generate(
        0,
        &render_prompt(&instructions.predicate, &input, ""),
        policy.default_max_new_tokens,
    )?;
    let mut predicates = extract_predicates(&raw);
    if mode != VerifierMode::None {
        let context = predicate_context(&rec.premises, &rec.conclusion, &predicates);
        let accepted = h.verify(0, VerifierTask::Predicate, &context, &predicates.join("\n"))?;
        predicates = accepted.lines().map(str::to_string).collect();
    }

    let mut output = render_predicates(&predicates);
    let mut pairs: Vec<Pair> = Vec::with_capacity(n + 1);
    for step in 1..=n + 1 {
        let sentence = if step <= n {
            &rec.premises[step - 1]
        } else {
            &rec.conclusion
        };
        let mut header = String::new();
        if step == 1 {
            header.push_str("Premises:\n");
        }
        if step == n + 1 {
            header.push_str("Conclusion:\n");
        }
        let prefix = format!("{output}\n{header}");
        let raw = h.generate(
            step,
            &render_prompt(&instructions.fol, &input, &prefix),
            policy.budget_for(sentence),
        )?;
        let Some(mut pair) = extract_formula(&raw) else {
            let d = Diagnostic::new(
                ErrorKind::CompletionError,
                Default::default(),
                format!("step {step} produced no formula"),
            );
            return Err(h.fail(InferenceError::Extraction(vec![d])));
        };
        if pair.nl.is_empty() {
            pair.nl = sentence.clone();
        }
        if mode == VerifierMode::OnOn {
            let context = fol_context(&predicates, &pair.fol, &pair.nl);
            pair.fol = h.verify(step, VerifierTask::Fol, &context, &pair.fol)?;
        }
        output = format!("{prefix}{}", pair.line());
        pairs.push(pair);
    }

    if mode == VerifierMode::OnOff {
        for (i, pair) in pairs.iter_mut().enumerate() {
            let context = fol_context(&predicates, &pair.fol, &pair.nl);
            pair.fol = h.verify(i + 1, VerifierTask::Fol, &context, &pair.fol)?;
        }
    }

    let conclusion = pairs.pop().expect("n + 1 formula steps ran");
    Ok(Run {
        translation: Translation {
            predicates,
            premises: pairs,
            conclusion,
        },
        audit: h.audit,
    })
}

/// Serves logged verifier verdicts in order.
struct LoggedCorrector {
    entries: Mutex<std::vec::IntoIter<AuditEntry>>,
}

impl Corrector for LoggedCorrector {
    fn correct(&self, _task: VerifierTask, _context: &str) -> Result<Verdict, GenError> {
        let e = self
            .entries
            .lock()
            .expect("unpoisoned")
            .next()
            .ok_or(GenError::ScriptExhausted(0))?;
        Ok(match e.verdict {
            AuditVerdict::Replaced | AuditVerdict::InvalidReplacement => {
                Verdict::Replace(e.replacement.unwrap_or_default())
            }
            AuditVerdict::NotRepaired => Verdict::NotRepaired,
            _ => Verdict::Correct,
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReplayError {
    #[error("replay failed: {0}")]
    Run(#[from] RunFailure),
    #[error("replay diverges from the log at entry {0}")]
    Diverged(usize),
}

/// Re-runs a record from its audit log alone and checks every prompt hash,
/// output and verdict against the log.
pub fn replay(
    rec: &Record,
    audit: &[AuditEntry],
    mode: VerifierMode,
    policy: &TokenPolicy,
    instructions: &Instructions,
) -> Result<Run, ReplayError> {
    let generator = MockPlayback::new(
        audit
            .iter()
            .filter(|e| e.phase == Phase::Generate)
            .map(|e| e.raw_output.clone()),
    );
    let verdicts = |phase: Phase| LoggedCorrector {
        entries: Mutex::new(
            audit
                .iter()
                .filter(|e| e.phase == phase)
                .cloned()
                .collect::<Vec<_>>()
                .into_iter(),
        ),
    };
    let pv = verdicts(Phase::VerifyPredicates);
    let fv = verdicts(Phase::VerifyFol);
    let run = run_incremental(&generator, rec, mode, &pv, &fv, policy, instructions)?;
    if let Some(i) = run.audit.iter().zip(audit).position(|(a, b)| a != b) {
        return Err(ReplayError::Diverged(i));
    }
    if run.audit.len() != audit.len() {
        return Err(ReplayError::Diverged(run.audit.len().min(audit.len())));
    }
    Ok(run)
}
