//! Silver-standard corpus filtering.
//!
//! Each record goes through three stages and is rejected by the first one
//! that fails: format (a raw generation must extract cleanly), syntax (every
//! formula parses and carries no Error diagnostics) and semantic (the proved
//! label equals the gold label).

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{lint_corpus, lint_formula, Diagnostic, ErrorKind, Histogram, PredicateDecl, Severity};
use crate::extraction::extract;
use crate::jsonl::{self, JsonlError};
use crate::reasoner::{prove, Budget, Label, Outcome};
use crate::syntax::{parse, print, Atom, Formula, PrintStyle, Quantified, QuantifierKind, Span};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub premises: Vec<String>,
    pub conclusion: String,
    pub gold_label: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicates: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub premises_fol: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conclusion_fol: Option<String>,
    /// Generator output to be judged. When present it is the prediction and
    /// the FOL fields above, if any, are the reference translation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_generation: Option<String>,
}

impl Record {
    pub fn new(id: impl Into<String>, premises: Vec<String>, conclusion: impl Into<String>, gold_label: Label) -> Self {
        Record {
            id: id.into(),
            premises,
            conclusion: conclusion.into(),
            gold_label,
            predicates: None,
            premises_fol: None,
            conclusion_fol: None,
            raw_generation: None,
        }
    }

    pub fn with_fol(mut self, premises_fol: Vec<String>, conclusion_fol: impl Into<String>) -> Self {
        self.premises_fol = Some(premises_fol);
        self.conclusion_fol = Some(conclusion_fol.into());
        self
    }

    pub fn with_predicates(mut self, predicates: Vec<String>) -> Self {
        self.predicates = Some(predicates);
        self
    }

    pub fn with_raw_generation(mut self, raw: impl Into<String>) -> Self {
        self.raw_generation = Some(raw.into());
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Format,
    Syntax,
    Semantic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    Extraction,
    MissingFol,
    Diagnostics,
    LabelMismatch,
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rejection {
    pub stage: Stage,
    pub reason: RejectReason,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FilterOutcome {
    Retained(Record),
    Rejected(Rejection),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub budget: Budget,
    /// Reject records with Lint diagnostics as well as Errors.
    pub strict_lints: bool,
    pub workers: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            budget: Budget::default(),
            strict_lints: false,
            workers: 1,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub input: usize,
    pub retained: usize,
    pub rejected_format: usize,
    pub rejected_syntax: usize,
    pub rejected_semantic: usize,
    /// Semantic rejections caused by the reasoner budget.
    pub semantic_exhausted: usize,
    pub retention_pct: f64,
    pub per_kind: Histogram,
}

impl FilterReport {
    fn add(&mut self, outcome: &FilterOutcome) {
        self.input += 1;
        match outcome {
            FilterOutcome::Retained(_) => self.retained += 1,
            FilterOutcome::Rejected(r) => {
                match r.stage {
                    Stage::Format => self.rejected_format += 1,
                    Stage::Syntax => self.rejected_syntax += 1,
                    Stage::Semantic => self.rejected_semantic += 1,
                }
                if r.reason == RejectReason::Exhausted {
                    self.semantic_exhausted += 1;
                }
                for d in &r.diagnostics {
                    self.per_kind.add(d.kind);
                }
            }
        }
        self.retention_pct = if self.input == 0 {
            0.0
        } else {
            100.0 * self.retained as f64 / self.input as f64
        };
    }
}

/// Everything learned about one record, including diagnostics that did not
/// block it.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub outcome: FilterOutcome,
    pub diagnostics: Vec<Diagnostic>,
}

struct Candidate {
    predicates: Vec<String>,
    premises: Vec<String>,
    conclusion: String,
}

fn reject(stage: Stage, reason: RejectReason, diagnostics: Vec<Diagnostic>) -> Analysis {
    Analysis {
        outcome: FilterOutcome::Rejected(Rejection {
            stage,
            reason,
            diagnostics: diagnostics.clone(),
        }),
        diagnostics,
    }
}

fn missing_fol(msg: String) -> Analysis {
    let d = Diagnostic::new(ErrorKind::CompletionError, Span::default(), msg);
    reject(Stage::Format, RejectReason::MissingFol, vec![d])
}

fn parse_all(texts: &[String]) -> (Vec<Formula>, Vec<Diagnostic>) {
    let mut fs = Vec::new();
    let mut diags = Vec::new();
    for t in texts {
        match parse(t) {
            Ok(f) => fs.push(f),
            Err(d) => diags.push(d),
        }
    }
    (fs, diags)
}

/// Runs all stages on one record.
pub fn analyze_record(rec: &Record, cfg: &PipelineConfig) -> Analysis {
    let cand = match &rec.raw_generation {
        Some(raw) => match extract(raw, rec.premises.len()) {
            Ok(t) => Candidate {
                predicates: t.predicates.clone(),
                premises: t.premises.iter().map(|p| p.fol.clone()).collect(),
                conclusion: t.conclusion.fol.clone(),
            },
            Err(diags) => return reject(Stage::Format, RejectReason::Extraction, diags),
        },
        None => {
            let (Some(pf), Some(cf)) = (&rec.premises_fol, &rec.conclusion_fol) else {
                return missing_fol(format!("record `{}` has no FOL translation", rec.id));
            };
            if pf.len() != rec.premises.len() {
                return missing_fol(format!(
                    "record `{}` has {} premises but {} premise translations",
                    rec.id,
                    rec.premises.len(),
                    pf.len()
                ));
            }
            Candidate {
                predicates: rec.predicates.clone().unwrap_or_default(),
                premises: pf.clone(),
                conclusion: cf.clone(),
            }
        }
    };

    let mut texts = cand.premises.clone();
    texts.push(cand.conclusion.clone());
    let (formulas, mut diags) = parse_all(&texts);
    let mut decls = Vec::new();
    for p in &cand.predicates {
        match PredicateDecl::parse(p) {
            Ok(d) => decls.push(d),
            Err(d) => diags.push(d),
        }
    }
    if !diags.is_empty() {
        return reject(Stage::Syntax, RejectReason::Diagnostics, diags);
    }
    for f in &formulas {
        diags.extend(lint_formula(f));
    }
    diags.extend(lint_corpus(&formulas, &decls));
    let blocking: Vec<Diagnostic> = diags
        .iter()
        .filter(|d| d.severity == Severity::Error || cfg.strict_lints)
        .cloned()
        .collect();
    if !blocking.is_empty() {
        return Analysis {
            outcome: FilterOutcome::Rejected(Rejection {
                stage: Stage::Syntax,
                reason: RejectReason::Diagnostics,
                diagnostics: blocking,
            }),
            diagnostics: diags,
        };
    }

    let (premises, conclusion) = formulas.split_at(formulas.len() - 1);
    let outcome = prove(premises, &conclusion[0], &cfg.budget);
    let predicted = match outcome {
        Outcome::Exhausted => {
            let mut a = reject(Stage::Semantic, RejectReason::Exhausted, vec![]);
            a.diagnostics = diags;
            return a;
        }
        Outcome::Error(d) => {
            diags.push(d.clone());
            return Analysis {
                outcome: FilterOutcome::Rejected(Rejection {
                    stage: Stage::Syntax,
                    reason: RejectReason::Diagnostics,
                    diagnostics: vec![d],
                }),
                diagnostics: diags,
            };
        }
        other => other.label().expect("decisive outcome"),
    };
    if predicted != rec.gold_label {
        let gold = if rec.raw_generation.is_some() {
            gold_formulas(rec)
        } else {
            None
        };
        let sense = attribute_mismatch(&formulas, gold.as_deref(), predicted, rec.gold_label);
        diags.push(sense.clone());
        return Analysis {
            outcome: FilterOutcome::Rejected(Rejection {
                stage: Stage::Semantic,
                reason: RejectReason::LabelMismatch,
                diagnostics: vec![sense],
            }),
            diagnostics: diags,
        };
    }

    let canon = |f: &Formula| print(f, PrintStyle::Unicode);
    let retained = Record {
        id: rec.id.clone(),
        premises: rec.premises.clone(),
        conclusion: rec.conclusion.clone(),
        gold_label: rec.gold_label,
        predicates: if cand.predicates.is_empty() && rec.predicates.is_none() {
            None
        } else {
            Some(decls.iter().map(ToString::to_string).collect())
        },
        premises_fol: Some(premises.iter().map(canon).collect()),
        conclusion_fol: Some(canon(&conclusion[0])),
        raw_generation: None,
    };
    Analysis {
        outcome: FilterOutcome::Retained(retained),
        diagnostics: diags,
    }
}

fn gold_formulas(rec: &Record) -> Option<Vec<Formula>> {
    let mut texts = rec.premises_fol.clone()?;
    texts.push(rec.conclusion_fol.clone()?);
    let (fs, diags) = parse_all(&texts);
    diags.is_empty().then_some(fs)
}

pub fn filter_record(rec: &Record, cfg: &PipelineConfig) -> FilterOutcome {
    analyze_record(rec, cfg).outcome
}

fn quantifier_kinds(f: &Formula) -> Vec<QuantifierKind> {
    let mut out = Vec::new();
    f.visit_quantifiers(&mut |q: &Quantified| out.push(q.kind));
    out
}

/// Names the likely Sense error behind a label mismatch by comparing the
/// first statement that differs from the reference translation.
pub fn attribute_mismatch(
    predicted: &[Formula],
    gold: Option<&[Formula]>,
    predicted_label: Label,
    gold_label: Label,
) -> Diagnostic {
    let labels = format!("proved {predicted_label}, expected {gold_label}");
    let generic = || {
        Diagnostic::new(
            ErrorKind::PredicateError,
            Span::default(),
            format!("label mismatch: {labels}"),
        )
        .with_severity(Severity::Error)
    };
    let Some(gold) = gold else {
        return generic();
    };
    let Some((i, (p, g))) = predicted.iter().zip(gold).enumerate().find(|(_, (p, g))| p != g) else {
        return generic();
    };
    let (kind, detail) = if quantifier_kinds(p) != quantifier_kinds(g) {
        (
            ErrorKind::IncorrectQuantifier,
            "quantifiers differ from the reference".to_string(),
        )
    } else {
        let pa: Vec<&Atom> = p.atoms();
        let ga: Vec<&Atom> = g.atoms();
        let renamed: Vec<(&Atom, &Atom)> = pa
            .iter()
            .zip(&ga)
            .filter(|(a, b)| a.predicate != b.predicate)
            .map(|(a, b)| (*a, *b))
            .collect();
        let only_names =
            pa.len() == ga.len() && !renamed.is_empty() && pa.iter().zip(&ga).all(|(a, b)| a.args == b.args);
        if only_names {
            let (a, b) = renamed[0];
            (
                ErrorKind::PredicateMismatch,
                format!("`{}` used where the reference has `{}`", a.predicate, b.predicate),
            )
        } else {
            (
                ErrorKind::PredicateError,
                "predicates differ from the reference".to_string(),
            )
        }
    };
    Diagnostic::new(
        kind,
        Span::default(),
        format!("statement {}: {detail}; {labels}", i + 1),
    )
    .with_severity(Severity::Error)
}

/// Order-preserving parallel map on a pool of `workers` threads.
pub fn map_ordered<T: Sync, U: Send>(items: &[T], workers: usize, f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    if workers <= 1 {
        return items.iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    pool.install(|| items.par_iter().map(f).collect())
}

const CHUNK: usize = 1024;

/// Filters `records`, writes the retained ones to `out` as JSONL and
/// returns the counts. Output order follows input order for any worker
/// count. Nothing is left at `out` if writing fails.
pub fn build_dataset(
    records: impl IntoIterator<Item = Record>,
    out: &Path,
    cfg: &PipelineConfig,
) -> Result<FilterReport, JsonlError> {
    let mut report = FilterReport::default();
    let mut records = records.into_iter().peekable();
    jsonl::write_atomic(out, |w| {
        while records.peek().is_some() {
            let chunk: Vec<Record> = records.by_ref().take(CHUNK).collect();
            for outcome in map_ordered(&chunk, cfg.workers, |r| filter_record(r, cfg)) {
                if let FilterOutcome::Retained(r) = &outcome {
                    serde_json::to_writer(&mut *w, r)?;
                    w.write_all(b"\n")?;
                }
                report.add(&outcome);
            }
        }
        Ok(())
    })?;
    Ok(report)
}

/// Histogram of every diagnostic found across the corpus, blocking or not.
pub fn error_distribution(records: &[Record], cfg: &PipelineConfig) -> Histogram {
    let mut h = Histogram::default();
    for a in map_ordered(records, cfg.workers, |r| analyze_record(r, cfg)) {
        for d in &a.diagnostics {
            h.add(d.kind);
        }
    }
    h
}
