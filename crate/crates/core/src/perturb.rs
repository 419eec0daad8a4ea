//! Verifier training corpora built from controlled corruptions of gold
//! predicates and formulas, harvested generator mistakes and untouched
//! gold items labelled `correct`.
//!
//! Every perturbation is deterministic in its seed and returns `None` when
//! the kind does not apply to the input; callers resample another kind.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::augment::record_translation;
use crate::diagnostics::{placeholder_var, ErrorKind, PredicateDecl};
use crate::extraction::Translation;
use crate::pipeline::{map_ordered, Record};
use crate::syntax::{parse, print, print_annotated, Atom, Connective, Formula, PrintStyle, Quantified, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PerturbKind {
    OmitOnePredicate,
    OmitOneVariable,
    OmitVariableAndPredicate,
    OmitOrAddOneVariable,
    AddPluralPredicate,
    DuplicatePredicate,
    ChangeQuantifierPosition,
    OmitOneQuantifier,
    OmitLastBracket,
    AddOrOmitNegation,
    OmitArgsFromFacts,
    AddOrOmitQuantifierPW,
    SwapOperators,
    AddPluralPredicatesFOL,
}

impl PerturbKind {
    pub const ALL: [PerturbKind; 14] = [
        PerturbKind::OmitOnePredicate,
        PerturbKind::OmitOneVariable,
        PerturbKind::OmitVariableAndPredicate,
        PerturbKind::OmitOrAddOneVariable,
        PerturbKind::AddPluralPredicate,
        PerturbKind::DuplicatePredicate,
        PerturbKind::ChangeQuantifierPosition,
        PerturbKind::OmitOneQuantifier,
        PerturbKind::OmitLastBracket,
        PerturbKind::AddOrOmitNegation,
        PerturbKind::OmitArgsFromFacts,
        PerturbKind::AddOrOmitQuantifierPW,
        PerturbKind::SwapOperators,
        PerturbKind::AddPluralPredicatesFOL,
    ];

    pub fn is_predicate_kind(self) -> bool {
        use PerturbKind::*;
        matches!(
            self,
            OmitOnePredicate
                | OmitOneVariable
                | OmitVariableAndPredicate
                | OmitOrAddOneVariable
                | AddPluralPredicate
                | DuplicatePredicate
        )
    }

    /// Diagnostics that reveal a FOL perturbation when the perturbed text is
    /// parsed and linted against the original's predicate signatures. Empty
    /// for kinds that only change meaning.
    pub fn expected_diagnostics(self) -> &'static [ErrorKind] {
        use PerturbKind::*;
        match self {
            OmitLastBracket => &[ErrorKind::ParenthesisImbalance],
            OmitOneQuantifier => &[ErrorKind::MissingQuantifier],
            ChangeQuantifierPosition | AddOrOmitQuantifierPW => {
                &[ErrorKind::QuantifierLocation, ErrorKind::MissingQuantifier]
            }
            AddPluralPredicatesFOL => &[ErrorKind::PredicateMismatch],
            OmitArgsFromFacts => &[ErrorKind::ArityMismatch],
            _ => &[],
        }
    }

    pub fn name(self) -> &'static str {
        use PerturbKind::*;
        match self {
            OmitOnePredicate => "OmitOnePredicate",
            OmitOneVariable => "OmitOneVariable",
            OmitVariableAndPredicate => "OmitVariableAndPredicate",
            OmitOrAddOneVariable => "OmitOrAddOneVariable",
            AddPluralPredicate => "AddPluralPredicate",
            DuplicatePredicate => "DuplicatePredicate",
            ChangeQuantifierPosition => "ChangeQuantifierPosition",
            OmitOneQuantifier => "OmitOneQuantifier",
            OmitLastBracket => "OmitLastBracket",
            AddOrOmitNegation => "AddOrOmitNegation",
            OmitArgsFromFacts => "OmitArgsFromFacts",
            AddOrOmitQuantifierPW => "AddOrOmitQuantifierPW",
            SwapOperators => "SwapOperators",
            AddPluralPredicatesFOL => "AddPluralPredicatesFOL",
        }
    }
}

impl fmt::Display for PerturbKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PerturbKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PerturbKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown perturbation kind `{s}`"))
    }
}

/// Kind sets tuned to the two corpus styles: rich connectives and
/// quantifier nesting, or simple facts and Horn-like rules.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    #[default]
    Folio,
    ProofWriter,
}

impl Profile {
    pub fn kinds(self) -> &'static [PerturbKind] {
        use PerturbKind::*;
        match self {
            Profile::Folio => &[
                OmitOnePredicate,
                OmitOneVariable,
                OmitVariableAndPredicate,
                ChangeQuantifierPosition,
                OmitOneQuantifier,
                OmitLastBracket,
            ],
            Profile::ProofWriter => &[
                OmitOnePredicate,
                OmitOrAddOneVariable,
                AddPluralPredicate,
                DuplicatePredicate,
                AddOrOmitNegation,
                OmitArgsFromFacts,
                AddOrOmitQuantifierPW,
                SwapOperators,
                AddPluralPredicatesFOL,
            ],
        }
    }
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "folio" => Ok(Profile::Folio),
            "proofwriter" => Ok(Profile::ProofWriter),
            _ => Err(format!("unknown profile `{s}` (expected folio or proofwriter)")),
        }
    }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn fresh_var(taken: &[Term]) -> Term {
    (0..)
        .map(placeholder_var)
        .map(Term::Variable)
        .find(|t| !taken.contains(t))
        .expect("unbounded supply")
}

fn max_arity_index(preds: &[PredicateDecl], rng: &mut ChaCha8Rng) -> Option<usize> {
    let max = preds.iter().map(|p| p.arity).max()?;
    if max == 0 {
        return None;
    }
    let best: Vec<usize> = (0..preds.len()).filter(|&i| preds[i].arity == max).collect();
    best.choose(rng).copied()
}

fn drop_last_arg(p: &PredicateDecl) -> PredicateDecl {
    let mut args = p.sample_args.clone();
    args.pop();
    PredicateDecl::new(p.name.clone(), args)
}

/// Corrupts a predicate list.
pub fn perturb_predicates(preds: &[PredicateDecl], kind: PerturbKind, seed: u64) -> Option<Vec<PredicateDecl>> {
    use PerturbKind::*;
    let mut rng = rng_for(seed);
    let mut out = preds.to_vec();
    match kind {
        OmitOnePredicate => {
            if out.is_empty() {
                return None;
            }
            out.remove(rng.random_range(0..out.len()));
        }
        OmitOneVariable => {
            let i = max_arity_index(preds, &mut rng)?;
            out[i] = drop_last_arg(&preds[i]);
        }
        OmitVariableAndPredicate => {
            if preds.len() < 2 {
                return None;
            }
            let i = max_arity_index(preds, &mut rng)?;
            out[i] = drop_last_arg(&preds[i]);
            let others: Vec<usize> = (0..out.len()).filter(|&j| j != i).collect();
            let j = *others.choose(&mut rng).expect("at least one other predicate");
            out.remove(j);
        }
        OmitOrAddOneVariable => {
            if out.is_empty() {
                return None;
            }
            let i = rng.random_range(0..out.len());
            let mut args = out[i].sample_args.clone();
            if args.len() >= 2 {
                args.remove(rng.random_range(0..args.len()));
            } else {
                args.push(fresh_var(&args));
            }
            out[i] = PredicateDecl::new(out[i].name.clone(), args);
        }
        AddPluralPredicate => {
            let candidates: Vec<&PredicateDecl> = preds
                .iter()
                .filter(|p| {
                    let plural = format!("{}s", p.name).to_lowercase();
                    !preds.iter().any(|q| q.name.to_lowercase() == plural)
                })
                .collect();
            let p = candidates.choose(&mut rng)?;
            out.push(PredicateDecl::new(format!("{}s", p.name), p.sample_args.clone()));
        }
        DuplicatePredicate => {
            let p = preds.choose(&mut rng)?;
            let mut args = p.sample_args.clone();
            args.push(fresh_var(&args));
            out.push(PredicateDecl::new(p.name.clone(), args));
        }
        _ => return None,
    }
    Some(out)
}

/// Child position inside a formula: 0 for unary bodies and left operands,
/// 1 for right operands.
type Path = Vec<usize>;

fn paths(f: &Formula) -> Vec<Path> {
    fn walk(f: &Formula, here: &mut Path, out: &mut Vec<Path>) {
        out.push(here.clone());
        let kids: Vec<&Formula> = match f {
            Formula::Atom(_) => vec![],
            Formula::Not(g) => vec![g],
            Formula::Binary(_, l, r) => vec![l, r],
            Formula::Quantified(q) => vec![&q.body],
        };
        for (i, k) in kids.into_iter().enumerate() {
            here.push(i);
            walk(k, here, out);
            here.pop();
        }
    }
    let mut out = Vec::new();
    walk(f, &mut Vec::new(), &mut out);
    out
}

fn at<'a>(f: &'a Formula, path: &[usize]) -> &'a Formula {
    match path.split_first() {
        None => f,
        Some((&i, rest)) => match f {
            Formula::Not(g) => at(g, rest),
            Formula::Binary(_, l, r) => at(if i == 0 { l } else { r }, rest),
            Formula::Quantified(q) => at(&q.body, rest),
            Formula::Atom(_) => f,
        },
    }
}

fn replace(f: &Formula, path: &[usize], new: Formula) -> Formula {
    match path.split_first() {
        None => new,
        Some((&i, rest)) => match f {
            Formula::Not(g) => Formula::not(replace(g, rest, new)),
            Formula::Binary(op, l, r) => {
                if i == 0 {
                    Formula::binary(*op, replace(l, rest, new), (**r).clone())
                } else {
                    Formula::binary(*op, (**l).clone(), replace(r, rest, new))
                }
            }
            Formula::Quantified(q) => Formula::Quantified(Quantified {
                body: Box::new(replace(&q.body, rest, new)),
                ..q.clone()
            }),
            Formula::Atom(_) => f.clone(),
        },
    }
}

/// Renames free occurrences of `from`; bound variable lists are renamed
/// too when `binders` is set.
fn rename(f: &Formula, from: &str, to: &str, binders: bool) -> Formula {
    match f {
        Formula::Atom(a) => {
            let map = BTreeMap::from([(from.to_string(), Term::Variable(to.to_string()))]);
            Formula::Atom(a.substitute(&map))
        }
        Formula::Not(g) => Formula::not(rename(g, from, to, binders)),
        Formula::Binary(op, l, r) => Formula::binary(*op, rename(l, from, to, binders), rename(r, from, to, binders)),
        Formula::Quantified(q) => {
            if q.vars.iter().any(|v| v == from) {
                if !binders {
                    return f.clone();
                }
                let vars = q
                    .vars
                    .iter()
                    .map(|v| if v == from { to.to_string() } else { v.clone() });
                return Formula::quantified(q.kind, vars, rename(&q.body, from, to, binders));
            }
            Formula::Quantified(Quantified {
                body: Box::new(rename(&q.body, from, to, binders)),
                ..q.clone()
            })
        }
    }
}

fn occurrences(f: &Formula, var: &str) -> usize {
    fn in_term(t: &Term, var: &str) -> usize {
        match t {
            Term::Variable(v) => usize::from(v == var),
            Term::Constant(_) => 0,
            Term::Function(_, args) => args.iter().map(|a| in_term(a, var)).sum(),
        }
    }
    f.atoms().iter().flat_map(|a| &a.args).map(|t| in_term(t, var)).sum()
}

fn quantifier_paths(f: &Formula) -> Vec<Path> {
    paths(f)
        .into_iter()
        .filter(|p| matches!(at(f, p), Formula::Quantified(_)))
        .collect()
}

fn omit_quantifier(f: &Formula, rng: &mut ChaCha8Rng) -> Option<String> {
    let printed = print_annotated(f, PrintStyle::Unicode);
    let block = printed.quantifier_blocks.choose(rng)?;
    let mut s = printed.text.clone();
    s.replace_range(block.clone(), "");
    Some(s)
}

/// Marker names that cannot collide with parsed identifiers.
fn marker(v: &str) -> String {
    format!("{v}#moved")
}

fn change_quantifier_position(f: &Formula, rng: &mut ChaCha8Rng) -> Option<String> {
    let mut blocks = quantifier_paths(f);
    blocks.shuffle(rng);
    let p = blocks.first()?;
    let Formula::Quantified(q) = at(f, p) else {
        unreachable!("path selects a quantifier")
    };
    let mut body = (*q.body).clone();
    for v in &q.vars {
        body = rename(&body, v, &marker(v), false);
    }
    let stripped = replace(f, p, body);
    let totals: Vec<usize> = q.vars.iter().map(|v| occurrences(&stripped, &marker(v))).collect();
    let restore = |g: &Formula| {
        q.vars
            .iter()
            .fold(g.clone(), |acc, v| rename(&acc, &marker(v), v, true))
    };
    let mut options: Vec<String> = paths(&stripped)
        .into_iter()
        .filter(|s| {
            let sub = at(&stripped, s);
            q.vars
                .iter()
                .zip(&totals)
                .any(|(v, &total)| occurrences(sub, &marker(v)) < total)
        })
        .map(|s| {
            let sub = at(&stripped, &s).clone();
            let moved = Formula::quantified(q.kind, q.vars.iter().map(|v| marker(v)), sub);
            print(&restore(&replace(&stripped, &s, moved)), PrintStyle::Unicode)
        })
        .collect();
    let block_text = print_annotated(at(f, p), PrintStyle::Unicode);
    let head = block_text.text[block_text.quantifier_blocks[0].clone()]
        .trim_end()
        .to_string();
    options.push(format!("{} {head}", print(&restore(&stripped), PrintStyle::Unicode)));
    let base = print(f, PrintStyle::Unicode);
    options.retain(|o| *o != base);
    options.choose(rng).cloned()
}

fn ground_atom_paths(f: &Formula) -> Vec<Path> {
    paths(f)
        .into_iter()
        .filter(|p| matches!(at(f, p), Formula::Atom(a) if a.is_ground()))
        .collect()
}

fn toggle_negation(f: &Formula, rng: &mut ChaCha8Rng) -> Option<Formula> {
    let p = ground_atom_paths(f).choose(rng)?.clone();
    let atom = at(f, &p).clone();
    if let Some((_, parent)) = p.split_last() {
        if let Formula::Not(_) = at(f, parent) {
            return Some(replace(f, parent, atom));
        }
    }
    Some(replace(f, &p, Formula::not(atom)))
}

fn omit_fact_argument(f: &Formula, rng: &mut ChaCha8Rng) -> Option<Formula> {
    let candidates: Vec<Path> = ground_atom_paths(f)
        .into_iter()
        .filter(|p| matches!(at(f, p), Formula::Atom(a) if a.arity() >= 2))
        .collect();
    let p = candidates.choose(rng)?;
    let Formula::Atom(a) = at(f, p) else {
        unreachable!("path selects an atom")
    };
    let mut args = a.args.clone();
    args.remove(rng.random_range(0..args.len()));
    Some(replace(f, p, Formula::Atom(Atom::new(a.predicate.clone(), args))))
}

fn add_or_omit_quantifier(f: &Formula, rng: &mut ChaCha8Rng) -> Option<String> {
    let blocks = quantifier_paths(f);
    let choice = if blocks.is_empty() { 2 } else { rng.random_range(0..3) };
    match choice {
        0 => omit_quantifier(f, rng),
        1 => {
            let p = blocks.choose(rng)?;
            let Formula::Quantified(q) = at(f, p) else {
                unreachable!("path selects a quantifier")
            };
            let doubled = Formula::quantified(q.kind, q.vars.clone(), Formula::Quantified(q.clone()));
            Some(print(&replace(f, p, doubled), PrintStyle::Unicode))
        }
        _ => {
            let symbols = f.symbols();
            let v = (0..)
                .map(placeholder_var)
                .find(|v| !symbols.contains(v))
                .expect("unbounded supply");
            Some(print(&Formula::forall([v], f.clone()), PrintStyle::Unicode))
        }
    }
}

fn swap_operator(f: &Formula, rng: &mut ChaCha8Rng) -> Option<Formula> {
    let candidates: Vec<Path> = paths(f)
        .into_iter()
        .filter(|p| matches!(at(f, p), Formula::Binary(Connective::And | Connective::Implies, ..)))
        .collect();
    let p = candidates.choose(rng)?;
    let Formula::Binary(op, l, r) = at(f, p) else {
        unreachable!("path selects a binary node")
    };
    let flipped = if *op == Connective::And {
        Connective::Implies
    } else {
        Connective::And
    };
    Some(replace(f, p, Formula::binary(flipped, (**l).clone(), (**r).clone())))
}

fn pluralize_one(f: &Formula, rng: &mut ChaCha8Rng) -> Option<Formula> {
    let names: Vec<String> = f.predicates().into_iter().map(|(n, _)| n.to_lowercase()).collect();
    let candidates: Vec<Path> = paths(f)
        .into_iter()
        .filter(|p| match at(f, p) {
            Formula::Atom(a) => !names.contains(&format!("{}s", a.predicate.to_lowercase())),
            _ => false,
        })
        .collect();
    let p = candidates.choose(rng)?;
    let Formula::Atom(a) = at(f, p) else {
        unreachable!("path selects an atom")
    };
    Some(replace(
        f,
        p,
        Formula::Atom(Atom::new(format!("{}s", a.predicate), a.args.clone())),
    ))
}

/// Corrupts one formula. The result is text because several kinds produce
/// something that no longer parses.
pub fn perturb_fol(f: &Formula, kind: PerturbKind, seed: u64) -> Option<String> {
    use PerturbKind::*;
    let mut rng = rng_for(seed);
    let base = print(f, PrintStyle::Unicode);
    let out = match kind {
        OmitLastBracket => {
            let i = base.rfind(')')?;
            let mut s = base.clone();
            s.remove(i);
            Some(s)
        }
        OmitOneQuantifier => omit_quantifier(f, &mut rng),
        ChangeQuantifierPosition => change_quantifier_position(f, &mut rng),
        AddOrOmitQuantifierPW => add_or_omit_quantifier(f, &mut rng),
        AddOrOmitNegation => toggle_negation(f, &mut rng).map(|g| print(&g, PrintStyle::Unicode)),
        OmitArgsFromFacts => omit_fact_argument(f, &mut rng).map(|g| print(&g, PrintStyle::Unicode)),
        SwapOperators => swap_operator(f, &mut rng).map(|g| print(&g, PrintStyle::Unicode)),
        AddPluralPredicatesFOL => pluralize_one(f, &mut rng).map(|g| print(&g, PrintStyle::Unicode)),
        _ => None,
    }?;
    (out != base).then_some(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VerifierTask {
    Predicate,
    #[serde(rename = "FOL")]
    Fol,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Provenance {
    Manual,
    Harvested,
    Correct,
}

pub const CORRECT: &str = "correct";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifierInstance {
    pub task: VerifierTask,
    pub context: String,
    pub target: String,
    pub provenance: Provenance,
    pub kind: Option<PerturbKind>,
}

/// Predicate-verifier input: the statements and the candidate predicates.
pub fn predicate_context(premises: &[String], conclusion: &str, predicates: &[String]) -> String {
    let mut s = crate::augment::render_input(premises, conclusion);
    s.push('\n');
    s.push_str(&crate::extraction::render_predicates(predicates));
    s
}

/// FOL-verifier input: predicates, the candidate formula and its sentence.
pub fn fol_context(predicates: &[String], fol: &str, nl: &str) -> String {
    format!(
        "{}\nFOL:\n{fol}\nNL:\n{nl}",
        crate::extraction::render_predicates(predicates)
    )
}

fn canonical_fol(text: &str) -> String {
    parse(text)
        .map(|f| print(&f, PrintStyle::Unicode))
        .unwrap_or_else(|_| text.trim().to_string())
}

fn canonical_predicates(preds: &[String]) -> Vec<String> {
    let mut out: Vec<String> = preds
        .iter()
        .map(|p| {
            PredicateDecl::parse(p)
                .map(|d| d.to_string())
                .unwrap_or_else(|_| p.trim().to_string())
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Turns mismatches between predictions and gold translations into
/// verifier instances whose target is the gold text.
pub fn harvest_errors(pairs: &[(Translation, Record)]) -> Vec<VerifierInstance> {
    let mut out = Vec::new();
    for (pred, rec) in pairs {
        let Ok(gold) = record_translation(rec) else {
            continue;
        };
        if canonical_predicates(&pred.predicates) != canonical_predicates(&gold.predicates) {
            out.push(VerifierInstance {
                task: VerifierTask::Predicate,
                context: predicate_context(&rec.premises, &rec.conclusion, &pred.predicates),
                target: gold.predicates.join("\n"),
                provenance: Provenance::Harvested,
                kind: None,
            });
        }
        for (p, g) in pred.fols().zip(gold.fols()) {
            let gold_canon = canonical_fol(g);
            if canonical_fol(p) != gold_canon {
                let nl = gold
                    .premises
                    .iter()
                    .chain(std::iter::once(&gold.conclusion))
                    .find(|x| x.fol == g)
                    .map_or("", |x| x.nl.as_str());
                out.push(VerifierInstance {
                    task: VerifierTask::Fol,
                    context: fol_context(&gold.predicates, p, nl),
                    target: gold_canon,
                    provenance: Provenance::Harvested,
                    kind: None,
                });
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbConfig {
    /// Share of non-`correct` instances; must exceed one half.
    pub perturbed_fraction: f64,
    pub profile: Profile,
    /// Overrides the profile's kind set.
    pub kinds: Option<Vec<PerturbKind>>,
    pub seed: u64,
    pub workers: usize,
}

impl Default for PerturbConfig {
    fn default() -> Self {
        PerturbConfig {
            perturbed_fraction: 0.6,
            profile: Profile::default(),
            kinds: None,
            seed: 0,
            workers: 1,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PerturbError {
    #[error("perturbed_fraction must be in (0.5, 1), got {0}")]
    Fraction(f64),
    #[error("no seed records")]
    EmptySeeds,
}

/// Instance counts per task and provenance, plus per-kind manual counts.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PerturbReport {
    pub by_task: BTreeMap<String, BTreeMap<String, usize>>,
    pub per_kind: BTreeMap<String, usize>,
    pub total: usize,
    pub perturbed_fraction: f64,
}

impl PerturbReport {
    fn from_instances(instances: &[VerifierInstance]) -> Self {
        let mut r = PerturbReport {
            total: instances.len(),
            ..PerturbReport::default()
        };
        for i in instances {
            let task = match i.task {
                VerifierTask::Predicate => "Predicate",
                VerifierTask::Fol => "FOL",
            };
            let prov = match i.provenance {
                Provenance::Manual => "Manual",
                Provenance::Harvested => "Harvested",
                Provenance::Correct => "Correct",
            };
            *r.by_task
                .entry(task.into())
                .or_default()
                .entry(prov.into())
                .or_default() += 1;
            if let Some(k) = i.kind {
                *r.per_kind.entry(k.name().into()).or_default() += 1;
            }
        }
        let perturbed = instances.iter().filter(|i| i.provenance != Provenance::Correct).count();
        r.perturbed_fraction = if instances.is_empty() {
            0.0
        } else {
            perturbed as f64 / instances.len() as f64
        };
        r
    }
}

struct SeedOutput {
    manual: Vec<VerifierInstance>,
    correct: Vec<VerifierInstance>,
}

fn first_applicable<T>(
    kinds: &[PerturbKind],
    rng: &mut ChaCha8Rng,
    mut apply: impl FnMut(PerturbKind, u64) -> Option<T>,
) -> Option<(PerturbKind, T)> {
    let mut order = kinds.to_vec();
    order.shuffle(rng);
    order.into_iter().find_map(|k| {
        let s = rng.random::<u64>();
        apply(k, s).map(|t| (k, t))
    })
}

fn perturb_seed(rec: &Record, kinds: &[PerturbKind], seed: u64) -> SeedOutput {
    let mut out = SeedOutput {
        manual: Vec::new(),
        correct: Vec::new(),
    };
    let Ok(gold) = record_translation(rec) else {
        return out;
    };
    let mut rng = rng_for(seed);
    let pred_kinds: Vec<PerturbKind> = kinds.iter().copied().filter(|k| k.is_predicate_kind()).collect();
    let fol_kinds: Vec<PerturbKind> = kinds.iter().copied().filter(|k| !k.is_predicate_kind()).collect();

    let decls: Option<Vec<PredicateDecl>> = gold.predicates.iter().map(|p| PredicateDecl::parse(p).ok()).collect();
    if let Some(decls) = decls {
        let gold_text = gold.predicates.join("\n");
        let hit = first_applicable(&pred_kinds, &mut rng, |k, s| perturb_predicates(&decls, k, s));
        if let Some((kind, perturbed)) = hit {
            let shown: Vec<String> = perturbed.iter().map(ToString::to_string).collect();
            out.manual.push(VerifierInstance {
                task: VerifierTask::Predicate,
                context: predicate_context(&rec.premises, &rec.conclusion, &shown),
                target: gold_text,
                provenance: Provenance::Manual,
                kind: Some(kind),
            });
        }
        out.correct.push(VerifierInstance {
            task: VerifierTask::Predicate,
            context: predicate_context(&rec.premises, &rec.conclusion, &gold.predicates),
            target: CORRECT.into(),
            provenance: Provenance::Correct,
            kind: None,
        });
    }

    for pair in gold.premises.iter().chain(std::iter::once(&gold.conclusion)) {
        let Ok(f) = parse(&pair.fol) else {
            continue;
        };
        let canon = print(&f, PrintStyle::Unicode);
        if let Some((kind, text)) = first_applicable(&fol_kinds, &mut rng, |k, s| perturb_fol(&f, k, s)) {
            out.manual.push(VerifierInstance {
                task: VerifierTask::Fol,
                context: fol_context(&gold.predicates, &text, &pair.nl),
                target: canon.clone(),
                provenance: Provenance::Manual,
                kind: Some(kind),
            });
        }
        out.correct.push(VerifierInstance {
            task: VerifierTask::Fol,
            context: fol_context(&gold.predicates, &canon, &pair.nl),
            target: CORRECT.into(),
            provenance: Provenance::Correct,
            kind: None,
        });
    }
    out
}

/// Builds a verifier corpus from gold records. Record `i` is perturbed with
/// the sub-seed `seed ^ i`, so output is independent of the worker count.
/// Correct instances are sampled so that perturbed and harvested items make
/// up at least `perturbed_fraction` of the result.
pub fn build_verifier_dataset(
    seeds: &[Record],
    harvested: &[VerifierInstance],
    cfg: &PerturbConfig,
) -> Result<(Vec<VerifierInstance>, PerturbReport), PerturbError> {
    let f = cfg.perturbed_fraction;
    if !(f > 0.5 && f < 1.0) {
        return Err(PerturbError::Fraction(f));
    }
    if seeds.is_empty() {
        return Err(PerturbError::EmptySeeds);
    }
    let kinds: Vec<PerturbKind> = cfg.kinds.clone().unwrap_or_else(|| cfg.profile.kinds().to_vec());
    let indexed: Vec<(usize, &Record)> = seeds.iter().enumerate().collect();
    let per_seed = map_ordered(&indexed, cfg.workers, |(i, rec)| {
        perturb_seed(rec, &kinds, cfg.seed ^ *i as u64)
    });

    let mut out: Vec<VerifierInstance> = Vec::new();
    let mut pool: Vec<VerifierInstance> = Vec::new();
    for s in per_seed {
        out.extend(s.manual);
        pool.extend(s.correct);
    }
    out.extend(harvested.iter().cloned());
    let wanted = ((out.len() as f64) * (1.0 - f) / f).floor() as usize;
    let mut rng = rng_for(cfg.seed);
    let mut picks: Vec<usize> = rand::seq::index::sample(&mut rng, pool.len(), wanted.min(pool.len())).into_vec();
    picks.sort_unstable();
    out.extend(picks.into_iter().map(|i| pool[i].clone()));
    let report = PerturbReport::from_instances(&out);
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{lint_corpus, lint_formula};
    use crate::reasoner::Label;

    fn decls(s: &[&str]) -> Vec<PredicateDecl> {
        s.iter().map(|d| PredicateDecl::parse(d).unwrap()).collect()
    }

    fn shown(d: &[PredicateDecl]) -> Vec<String> {
        d.iter().map(|p| format!("{}/{}", p.name, p.arity)).collect()
    }

    #[test]
    fn predicate_examples() {
        let base = decls(&["Rabbit(x)", "Have(x, y)"]);
        let out = perturb_predicates(&base, PerturbKind::OmitOneVariable, 1).unwrap();
        assert_eq!(shown(&out), vec!["Rabbit/1", "Have/1"]);
        let out = perturb_predicates(&decls(&["Cat(x)"]), PerturbKind::AddPluralPredicate, 1).unwrap();
        assert_eq!(shown(&out), vec!["Cat/1", "Cats/1"]);
        assert!(perturb_predicates(&[], PerturbKind::OmitOnePredicate, 1).is_none());
        let nullary = [PredicateDecl::new("P", vec![])];
        assert!(perturb_predicates(&nullary, PerturbKind::OmitOneVariable, 1).is_none());
        let dup = perturb_predicates(&decls(&["Cat(x)"]), PerturbKind::DuplicatePredicate, 1).unwrap();
        assert_eq!(dup[1].to_string(), "Cat(x, y)");
    }

    fn fol(s: &str, kind: PerturbKind, seed: u64) -> Option<String> {
        perturb_fol(&parse(s).unwrap(), kind, seed)
    }

    #[test]
    fn fol_examples() {
        assert_eq!(
            fol(
                "∀x (FleaBeetle(x) → ¬In(x, chrysomelidaeFamily))",
                PerturbKind::OmitOneQuantifier,
                3
            )
            .unwrap(),
            "(FleaBeetle(x) → ¬In(x, chrysomelidaeFamily))"
        );
        assert_eq!(
            fol("∀x (P(x) → Q(x))", PerturbKind::OmitLastBracket, 0).unwrap(),
            "∀x (P(x) → Q(x)"
        );
        assert_eq!(
            fol("∀x (P(x) ∧ Q(x))", PerturbKind::SwapOperators, 9).unwrap(),
            "∀x (P(x) → Q(x))"
        );
        assert_eq!(fol("Big(bob)", PerturbKind::AddOrOmitNegation, 2).unwrap(), "¬Big(bob)");
        assert_eq!(fol("¬Big(bob)", PerturbKind::AddOrOmitNegation, 2).unwrap(), "Big(bob)");
        assert_eq!(
            fol("Sees(tiger, mouse)", PerturbKind::OmitArgsFromFacts, 0).map(|s| s.len() < 18),
            Some(true)
        );
        assert!(fol("P(a)", PerturbKind::OmitOneQuantifier, 0).is_none());
        assert!(fol("P(a)", PerturbKind::OmitArgsFromFacts, 0).is_none());
    }

    fn detected(original: &str, kind: PerturbKind, text: &str) -> bool {
        let f = parse(original).unwrap();
        let expected = kind.expected_diagnostics();
        match parse(text) {
            Err(d) => expected.contains(&d.kind),
            Ok(g) => {
                let mut ds = lint_formula(&g);
                ds.extend(lint_corpus(&[g], &PredicateDecl::from_formulas([&f])));
                ds.iter().any(|d| expected.contains(&d.kind))
            }
        }
    }

    #[test]
    fn quantifier_moves_are_detected() {
        let src = "∀x ∃y (Owns(x, y) ∧ Pet(y) → Happy(x))";
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..40 {
            let text = fol(src, PerturbKind::ChangeQuantifierPosition, seed).unwrap();
            assert!(detected(src, PerturbKind::ChangeQuantifierPosition, &text), "{text}");
            seen.insert(text);
        }
        assert!(seen.len() > 3, "{seen:?}");
        for seed in 0..40 {
            let text = fol(src, PerturbKind::AddOrOmitQuantifierPW, seed).unwrap();
            assert!(detected(src, PerturbKind::AddOrOmitQuantifierPW, &text), "{text}");
        }
    }

    #[test]
    fn plural_and_arity_detected() {
        let src = "∀x (Cat(x) → Animal(x))";
        let t = fol(src, PerturbKind::AddPluralPredicatesFOL, 4).unwrap();
        assert!(detected(src, PerturbKind::AddPluralPredicatesFOL, &t), "{t}");
        let t = fol("Sees(tiger, mouse)", PerturbKind::OmitArgsFromFacts, 4).unwrap();
        assert!(detected("Sees(tiger, mouse)", PerturbKind::OmitArgsFromFacts, &t));
    }

    fn seeds(n: usize) -> Vec<Record> {
        (0..n)
            .map(|i| {
                Record::new(
                    format!("s{i}"),
                    vec!["Bob is big.".into(), "Big things are heavy.".into()],
                    "Bob is heavy.",
                    Label::True,
                )
                .with_fol(
                    vec![format!("Big(bob{i})"), "∀x (Big(x) ∧ Red(x) → Heavy(x))".into()],
                    format!("Heavy(bob{i})"),
                )
            })
            .collect()
    }

    #[test]
    fn dataset_is_reproducible_and_mixed() {
        let cfg = PerturbConfig {
            profile: Profile::ProofWriter,
            seed: 7,
            ..PerturbConfig::default()
        };
        let (a, report) = build_verifier_dataset(&seeds(10), &[], &cfg).unwrap();
        let (b, _) = build_verifier_dataset(
            &seeds(10),
            &[],
            &PerturbConfig {
                workers: 4,
                ..cfg.clone()
            },
        )
        .unwrap();
        assert_eq!(crate::jsonl::to_string(&a), crate::jsonl::to_string(&b));
        assert!(report.perturbed_fraction > 0.5);
        assert!(a
            .iter()
            .all(|i| (i.target == CORRECT) == (i.provenance == Provenance::Correct)));
        let manual = a.iter().filter(|i| i.provenance == Provenance::Manual).count();
        let correct = a.len() - manual;
        assert_eq!(correct, (manual as f64 * 0.4 / 0.6).floor() as usize);
    }

    #[test]
    fn config_rejections() {
        let bad = PerturbConfig {
            perturbed_fraction: 0.4,
            ..PerturbConfig::default()
        };
        assert_eq!(
            build_verifier_dataset(&seeds(1), &[], &bad).unwrap_err(),
            PerturbError::Fraction(0.4)
        );
        assert_eq!(
            build_verifier_dataset(&[], &[], &PerturbConfig::default()).unwrap_err(),
            PerturbError::EmptySeeds
        );
    }

    #[test]
    fn harvest() {
        let gold = Record::new("h", vec!["All rabbits have fur.".into()], "Rex has fur.", Label::True)
            .with_predicates(vec!["Rabbit(x)".into(), "Have(x, y)".into()])
            .with_fol(vec!["∀x(Rabbit(x) → Have(x,fur))".into()], "Have(rex, fur)");
        let mut pred = record_translation(&gold).unwrap();
        assert!(harvest_errors(&[(pred.clone(), gold.clone())]).is_empty());
        pred.premises[0].fol = "∃x(Rabbit(x) → Have(x,fur))".into();
        let h = harvest_errors(&[(pred.clone(), gold.clone())]);
        assert_eq!(h.len(), 1);
        assert_eq!(h[0].task, VerifierTask::Fol);
        assert_eq!(h[0].target, "∀x (Rabbit(x) → Have(x, fur))");
        pred.premises[0].fol = gold.premises_fol.as_ref().unwrap()[0].clone();
        pred.predicates.pop();
        let h = harvest_errors(&[(pred, gold)]);
        assert_eq!(h.len(), 1);
        assert_eq!(h[0].task, VerifierTask::Predicate);
    }
}
