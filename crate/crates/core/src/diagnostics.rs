//! Translation-error taxonomy.
//!
//! Unparseable text is classified by [`classify_failure`]; parseable formulas
//! go through [`lint_formula`] and, as a set, through [`lint_corpus`]. The
//! Sense kinds have no static signature and are only attached by the
//! dataset pipeline when a proof disagrees with the gold label.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::syntax::{parse_raw, Atom, Formula, ParseError, ParseErrorKind, Span, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    Parsing,
    Type,
    Token,
    Sense,
    Arities,
}

impl Category {
    pub fn name(self) -> &'static str {
        match self {
            Category::Parsing => "Parsing",
            Category::Type => "Type",
            Category::Token => "Token",
            Category::Sense => "Sense",
            Category::Arities => "Arities",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ErrorKind {
    ParenthesisImbalance,
    InvalidOperatorSequence,
    CompletionError,
    MissingQuantifier,
    QuantifierLocation,
    MissingVariable,
    SpecialToken,
    UnknownOperator,
    PredicateError,
    IncorrectQuantifier,
    PredicateMismatch,
    ArityMismatch,
    SubjectPredicate,
}

impl ErrorKind {
    pub const ALL: [ErrorKind; 13] = [
        ErrorKind::ParenthesisImbalance,
        ErrorKind::InvalidOperatorSequence,
        ErrorKind::CompletionError,
        ErrorKind::MissingQuantifier,
        ErrorKind::QuantifierLocation,
        ErrorKind::MissingVariable,
        ErrorKind::SpecialToken,
        ErrorKind::UnknownOperator,
        ErrorKind::PredicateError,
        ErrorKind::IncorrectQuantifier,
        ErrorKind::PredicateMismatch,
        ErrorKind::ArityMismatch,
        ErrorKind::SubjectPredicate,
    ];

    pub fn category(self) -> Category {
        use ErrorKind::*;
        match self {
            ParenthesisImbalance | InvalidOperatorSequence | CompletionError => Category::Parsing,
            MissingQuantifier | QuantifierLocation | MissingVariable => Category::Type,
            SpecialToken | UnknownOperator => Category::Token,
            PredicateError | IncorrectQuantifier | PredicateMismatch => Category::Sense,
            ArityMismatch | SubjectPredicate => Category::Arities,
        }
    }

    /// Severity when the kind is found by linting a formula that parsed.
    /// Parse failures are always [`Severity::Error`].
    pub fn default_severity(self) -> Severity {
        use ErrorKind::*;
        match self {
            ParenthesisImbalance
            | InvalidOperatorSequence
            | CompletionError
            | MissingQuantifier
            | SpecialToken
            | UnknownOperator
            | ArityMismatch => Severity::Error,
            QuantifierLocation | MissingVariable | PredicateError | IncorrectQuantifier | PredicateMismatch
            | SubjectPredicate => Severity::Lint,
        }
    }

    pub fn name(self) -> &'static str {
        use ErrorKind::*;
        match self {
            ParenthesisImbalance => "ParenthesisImbalance",
            InvalidOperatorSequence => "InvalidOperatorSequence",
            CompletionError => "CompletionError",
            MissingQuantifier => "MissingQuantifier",
            QuantifierLocation => "QuantifierLocation",
            MissingVariable => "MissingVariable",
            SpecialToken => "SpecialToken",
            UnknownOperator => "UnknownOperator",
            PredicateError => "PredicateError",
            IncorrectQuantifier => "IncorrectQuantifier",
            PredicateMismatch => "PredicateMismatch",
            ArityMismatch => "ArityMismatch",
            SubjectPredicate => "SubjectPredicate",
        }
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ErrorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ErrorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown error kind `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Severity {
    Error,
    Lint,
}

/// One detected translation error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: ErrorKind,
    pub severity: Severity,
    pub span: Span,
    pub message: String,
    /// The symbol the diagnostic is about (variable, predicate, constant).
    pub subject: Option<String>,
}

impl Diagnostic {
    pub fn new(kind: ErrorKind, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            kind,
            severity: kind.default_severity(),
            span,
            message: message.into(),
            subject: None,
        }
    }

    pub fn with_subject(mut self, subject: impl Into<String>) -> Self {
        self.subject = Some(subject.into());
        self
    }

    pub fn with_severity(mut self, severity: Severity) -> Self {
        self.severity = severity;
        self
    }

    pub fn category(&self) -> Category {
        self.kind.category()
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Lint => "lint",
        };
        write!(
            f,
            "{sev}[{}/{}] {}..{}: {}",
            self.category(),
            self.kind,
            self.span.start,
            self.span.end,
            self.message
        )
    }
}

impl Serialize for Diagnostic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Diagnostic", 6)?;
        s.serialize_field("category", self.category().name())?;
        s.serialize_field("kind", self.kind.name())?;
        s.serialize_field("severity", &self.severity)?;
        s.serialize_field("span", &self.span)?;
        s.serialize_field("message", &self.message)?;
        s.serialize_field("subject", &self.subject)?;
        s.end()
    }
}

/// A predicate symbol with its argument slots, e.g. `Have(x, y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    pub arity: usize,
    pub sample_args: Vec<Term>,
}

impl PredicateDecl {
    pub fn new(name: impl Into<String>, sample_args: Vec<Term>) -> Self {
        PredicateDecl {
            name: name.into(),
            arity: sample_args.len(),
            sample_args,
        }
    }

    /// Builds a declaration with variable placeholders `x`, `y`, `z`, ...
    pub fn with_arity(name: impl Into<String>, arity: usize) -> Self {
        PredicateDecl::new(name, (0..arity).map(|i| Term::var(placeholder_var(i))).collect())
    }

    /// Parses a declaration such as `Rabbit(x)` or `Dog($x)`. Text after a
    /// `:::` separator is a description and is ignored.
    pub fn parse(text: &str) -> Result<PredicateDecl, Diagnostic> {
        let decl = text.split(":::").next().unwrap_or("").trim().replace('$', "");
        match parse_raw(&decl) {
            Ok(Formula::Atom(a)) => Ok(PredicateDecl::new(a.predicate, a.args)),
            Ok(_) => Err(Diagnostic::new(
                ErrorKind::InvalidOperatorSequence,
                Span::new(0, decl.len()),
                format!("`{decl}` is not a single predicate"),
            )),
            Err(e) => Err(classify_failure(&decl, &e)),
        }
    }

    /// Declarations for every predicate signature in `formulas`, in order of
    /// first occurrence.
    pub fn from_formulas<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> Vec<PredicateDecl> {
        let mut out: Vec<PredicateDecl> = Vec::new();
        for f in formulas {
            for (name, arity) in f.predicates() {
                if !out.iter().any(|d| d.name == name && d.arity == arity) {
                    out.push(PredicateDecl::with_arity(name, arity));
                }
            }
        }
        out
    }
}

/// `x`, `y`, `z`, `u`, `v`, `w`, then `x1`, `y1`, ...
pub fn placeholder_var(i: usize) -> String {
    const BASE: [&str; 6] = ["x", "y", "z", "u", "v", "w"];
    let round = i / BASE.len();
    if round == 0 {
        BASE[i].to_string()
    } else {
        format!("{}{}", BASE[i % BASE.len()], round)
    }
}

impl fmt::Display for PredicateDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Atom::new(self.name.clone(), self.sample_args.clone()))
    }
}

/// Maps a raw parser failure onto the taxonomy. Exactly one diagnostic, for
/// the leftmost blocking problem.
pub fn classify_failure(text: &str, err: &ParseError) -> Diagnostic {
    let kind = match &err.kind {
        ParseErrorKind::UnclosedParen | ParseErrorKind::UnmatchedClose => ErrorKind::ParenthesisImbalance,
        ParseErrorKind::SpecialToken(_) => ErrorKind::SpecialToken,
        ParseErrorKind::UnknownOperator(_) => ErrorKind::UnknownOperator,
        ParseErrorKind::MisplacedQuantifier => ErrorKind::QuantifierLocation,
        ParseErrorKind::TrailingInput | ParseErrorKind::Incomplete | ParseErrorKind::Empty => {
            ErrorKind::CompletionError
        }
        ParseErrorKind::UnexpectedToken => ErrorKind::InvalidOperatorSequence,
    };
    let len = text.len();
    let span = Span::new(err.span.start.min(len), err.span.end.min(len));
    let subject = match &err.kind {
        ParseErrorKind::SpecialToken(c) => Some(c.to_string()),
        ParseErrorKind::UnknownOperator(op) => Some(op.clone()),
        _ => None,
    };
    Diagnostic {
        kind,
        severity: Severity::Error,
        span,
        message: err.message.clone(),
        subject,
    }
}

fn has_variable(t: &Term) -> bool {
    match t {
        Term::Variable(_) => true,
        Term::Constant(_) => false,
        Term::Function(_, args) => args.iter().any(has_variable),
    }
}

/// Number of variables bound by the chain of directly nested quantifier
/// blocks starting at `f`.
fn prefix_len(f: &Formula) -> usize {
    match f {
        Formula::Quantified(q) => q.vars.len() + prefix_len(&q.body),
        _ => 0,
    }
}

struct FormulaLinter {
    out: Vec<Diagnostic>,
}

impl FormulaLinter {
    fn walk(&mut self, f: &Formula, bound: &mut Vec<String>, under_prefix: bool, in_prefix: bool) {
        match f {
            Formula::Atom(a) => {
                if under_prefix && !a.args.iter().any(has_variable) {
                    self.out.push(
                        Diagnostic::new(
                            ErrorKind::MissingVariable,
                            a.span,
                            format!(
                                "`{}` has no bound variable inside a multi-quantifier scope",
                                a.predicate
                            ),
                        )
                        .with_subject(a.predicate.clone()),
                    );
                }
            }
            Formula::Not(g) => self.walk(g, bound, under_prefix, false),
            Formula::Binary(_, l, r) => {
                self.walk(l, bound, under_prefix, false);
                self.walk(r, bound, under_prefix, false);
            }
            Formula::Quantified(q) => {
                let body_free = q.body.free_variables();
                for v in &q.vars {
                    if bound.contains(v) {
                        self.out.push(
                            Diagnostic::new(
                                ErrorKind::QuantifierLocation,
                                q.span,
                                format!("`{v}` is quantified again inside its own scope"),
                            )
                            .with_subject(v.clone()),
                        );
                    } else if !body_free.contains(v) {
                        self.out.push(
                            Diagnostic::new(
                                ErrorKind::QuantifierLocation,
                                q.span,
                                format!("quantifier binds `{v}` but it is not used in its scope"),
                            )
                            .with_subject(v.clone()),
                        );
                    }
                }
                let starts_prefix = !in_prefix;
                let under = under_prefix || (starts_prefix && prefix_len(f) >= 2);
                let n = bound.len();
                bound.extend(q.vars.iter().cloned());
                self.walk(&q.body, bound, under, true);
                bound.truncate(n);
            }
        }
    }
}

fn first_atom_with_var(f: &Formula, var: &str) -> Span {
    fn mentions(t: &Term, v: &str) -> bool {
        match t {
            Term::Variable(n) => n == v,
            Term::Constant(_) => false,
            Term::Function(_, args) => args.iter().any(|a| mentions(a, v)),
        }
    }
    f.atoms()
        .into_iter()
        .find(|a| a.args.iter().any(|t| mentions(t, var)))
        .map(|a| a.span)
        .unwrap_or_default()
}

/// Lints one well-formed formula. Diagnostics are ordered by span.
pub fn lint_formula(f: &Formula) -> Vec<Diagnostic> {
    let mut out: Vec<Diagnostic> = f
        .free_variables_ordered()
        .into_iter()
        .map(|v| {
            Diagnostic::new(
                ErrorKind::MissingQuantifier,
                first_atom_with_var(f, &v),
                format!("variable `{v}` has no quantifier"),
            )
            .with_subject(v)
        })
        .collect();
    let mut linter = FormulaLinter { out: Vec::new() };
    linter.walk(f, &mut Vec::new(), false, false);
    out.extend(linter.out);
    out.sort_by_key(|d| (d.span.start, d.span.end, d.kind));
    out
}

/// Cross-formula checks: arity consistency, names used both as predicate
/// and constant, and singular/plural predicate pairs.
pub fn lint_corpus(formulas: &[Formula], predicates: &[PredicateDecl]) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    // name -> arity -> first span seen with that arity
    let mut arities: BTreeMap<String, BTreeMap<usize, Span>> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    let mut note = |name: &str, arity: usize, span: Span| {
        if !arities.contains_key(name) {
            order.push(name.to_string());
        }
        arities
            .entry(name.to_string())
            .or_default()
            .entry(arity)
            .or_insert(span);
    };
    for d in predicates {
        note(&d.name, d.arity, Span::default());
    }
    let mut constants: BTreeSet<String> = BTreeSet::new();
    let mut const_spans: BTreeMap<String, Span> = BTreeMap::new();
    for f in formulas {
        for a in f.atoms() {
            note(&a.predicate, a.arity(), a.span);
        }
        for a in f.atoms() {
            for t in &a.args {
                if let Term::Constant(c) = t {
                    constants.insert(c.clone());
                    const_spans.entry(c.to_lowercase()).or_insert(a.span);
                }
            }
        }
        constants.extend(f.constants());
    }

    for name in &order {
        let by_arity = &arities[name];
        if by_arity.len() > 1 {
            let list: Vec<String> = by_arity.keys().map(|a| a.to_string()).collect();
            let span = by_arity.values().skip(1).copied().next().unwrap_or_default();
            out.push(
                Diagnostic::new(
                    ErrorKind::ArityMismatch,
                    span,
                    format!("`{name}` is used with {} arguments", list.join(" and ")),
                )
                .with_subject(name.clone()),
            );
        }
    }

    let lowered_preds: BTreeMap<String, &String> = order.iter().map(|n| (n.to_lowercase(), n)).collect();
    for c in &constants {
        if let Some(pred) = lowered_preds.get(&c.to_lowercase()) {
            out.push(
                Diagnostic::new(
                    ErrorKind::SubjectPredicate,
                    const_spans.get(&c.to_lowercase()).copied().unwrap_or_default(),
                    format!("`{c}` is used both as a constant and as predicate `{pred}`"),
                )
                .with_subject(c.clone()),
            );
        }
    }

    for name in &order {
        let plural = format!("{}s", name.to_lowercase());
        if let Some(other) = lowered_preds.get(&plural) {
            out.push(
                Diagnostic::new(
                    ErrorKind::PredicateMismatch,
                    Span::default(),
                    format!("`{name}` and `{other}` look like the same predicate"),
                )
                .with_subject(format!("{name}/{other}")),
            );
        }
    }
    out
}

/// Counts of diagnostics per `(category, kind)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Histogram(pub BTreeMap<(Category, ErrorKind), usize>);

impl Histogram {
    pub fn add(&mut self, kind: ErrorKind) {
        *self.0.entry((kind.category(), kind)).or_default() += 1;
    }

    pub fn merge(&mut self, other: &Histogram) {
        for (k, v) in &other.0 {
            *self.0.entry(*k).or_default() += v;
        }
    }

    pub fn get(&self, kind: ErrorKind) -> usize {
        self.0.get(&(kind.category(), kind)).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `category,kind,count` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("category,kind,count\n");
        for ((c, k), n) in &self.0 {
            s.push_str(&format!("{c},{k},{n}\n"));
        }
        s
    }
}

impl Serialize for Histogram {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let map: BTreeMap<String, usize> = self.0.iter().map(|((c, k), n)| (format!("{c}/{k}"), *n)).collect();
        map.serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for Histogram {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let map: BTreeMap<String, usize> = BTreeMap::deserialize(deserializer)?;
        let mut h = Histogram::default();
        for (key, n) in map {
            let kind = key
                .split('/')
                .nth(1)
                .ok_or_else(|| serde::de::Error::custom(format!("bad histogram key `{key}`")))?
                .parse::<ErrorKind>()
                .map_err(serde::de::Error::custom)?;
            h.0.insert((kind.category(), kind), n);
        }
        Ok(h)
    }
}

pub fn taxonomy_report(diags: &[Diagnostic]) -> Histogram {
    let mut h = Histogram::default();
    for d in diags {
        h.add(d.kind);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn fail(s: &str) -> ErrorKind {
        parse(s).unwrap_err().kind
    }

    fn lint_kinds(s: &str) -> Vec<ErrorKind> {
        lint_formula(&parse(s).unwrap()).into_iter().map(|d| d.kind).collect()
    }

    #[test]
    fn category_mapping_is_total() {
        use Category::*;
        let expected = [
            Parsing, Parsing, Parsing, Type, Type, Type, Token, Token, Sense, Sense, Sense, Arities, Arities,
        ];
        for (k, c) in ErrorKind::ALL.iter().zip(expected) {
            assert_eq!(k.category(), c, "{k}");
            assert_eq!(k.name().parse::<ErrorKind>().unwrap(), *k);
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            fail("∀x (Athlete(x) → ¬NeverExercises(x)) Never: does not exist a time"),
            ErrorKind::CompletionError
        );
        assert_eq!(
            fail("∀x (Rating(x, y) ∧ y > 4 → Listed(x))"),
            ErrorKind::UnknownOperator
        );
        assert_eq!(fail("P(a"), ErrorKind::ParenthesisImbalance);
        assert_eq!(
            fail("(BeneficialTo(cherry, people) ⊕ On(cherry, warningList)) → ¬RedFruit(cherry))"),
            ErrorKind::ParenthesisImbalance
        );
        assert_eq!(fail("Endowment(yale, $42.3 billion)"), ErrorKind::SpecialToken);
        assert_eq!(fail("P(a) ∧ ∨ Q(a)"), ErrorKind::InvalidOperatorSequence);
    }

    #[test]
    fn classified_failures_are_errors_within_bounds() {
        for s in ["P(a", "P(a) ∧", "", "P($)"] {
            let d = parse(s).unwrap_err();
            assert!(d.is_error());
            assert!(d.span.end <= s.len());
        }
    }

    #[test]
    fn missing_quantifier() {
        let f = parse("BerkeleyCollege(x) ∧ ResidentialCollegeAt(x, yaleUniversity)").unwrap();
        let d = lint_formula(&f);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, ErrorKind::MissingQuantifier);
        assert_eq!(d[0].subject.as_deref(), Some("x"));
        assert_eq!(d[0].severity, Severity::Error);
    }

    #[test]
    fn quantifier_location() {
        let k = lint_kinds("∃y(Own(emily,y) ∧ Roommate(y)) → ∃y(Own(emily,y) ∧ LiveIn(emily, apartment))");
        assert_eq!(k, vec![ErrorKind::QuantifierLocation]);
        assert_eq!(lint_kinds("∀x (P(a))"), vec![ErrorKind::QuantifierLocation]);
    }

    #[test]
    fn missing_variable() {
        let k = lint_kinds("∀x ∃y (In(indonesia) ∧ Prosecutor(x) ∧ SpecialCrime(y) → InvestigatePersonally(x, y))");
        assert_eq!(k, vec![ErrorKind::MissingVariable]);
    }

    #[test]
    fn clean_formula() {
        assert!(lint_kinds("∀x (P(x) → Q(x))").is_empty());
        assert!(lint_kinds("Sees(Tiger, Mouse)").is_empty());
    }

    fn corpus(srcs: &[&str]) -> Vec<ErrorKind> {
        let fs: Vec<Formula> = srcs.iter().map(|s| parse(s).unwrap()).collect();
        lint_corpus(&fs, &[]).into_iter().map(|d| d.kind).collect()
    }

    #[test]
    fn arity_mismatch() {
        let fs: Vec<Formula> = [
            "Sees(Tiger, Mouse)",
            "∀x((Visits(x,Rabbit) ∧ Sees(Mouse)) → Visits(x,Tiger))",
        ]
        .iter()
        .map(|s| parse(s).unwrap())
        .collect();
        let d = lint_corpus(&fs, &[]);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, ErrorKind::ArityMismatch);
        assert_eq!(d[0].subject.as_deref(), Some("Sees"));
        assert!(d[0].message.contains('1') && d[0].message.contains('2'));
    }

    #[test]
    fn arity_against_declarations() {
        let f = vec![parse("Have(rex)").unwrap()];
        let decls = vec![PredicateDecl::parse("Have(x, y)").unwrap()];
        let d = lint_corpus(&f, &decls);
        assert_eq!(d[0].kind, ErrorKind::ArityMismatch);
    }

    #[test]
    fn subject_predicate() {
        assert_eq!(
            corpus(&["Platypus(platypus) ∧ ¬Teeth(platypus)"]),
            vec![ErrorKind::SubjectPredicate]
        );
    }

    #[test]
    fn plural_pair() {
        assert_eq!(corpus(&["Cat(tom)", "Cats(tom)"]), vec![ErrorKind::PredicateMismatch]);
        assert!(corpus(&["Cat(tom)", "Dog(tom)"]).is_empty());
    }

    #[test]
    fn no_static_sense_diagnostics() {
        let srcs = [
            "∃x (FleaBeetle(x) → ¬InFamily(x, chrysomelidae))",
            "¬Solid2Pointers(jack) ∧ Successful3Pointers(jack)",
            "¬High(NewHaven)",
            "Low(towerA)",
        ];
        let fs: Vec<Formula> = srcs.iter().map(|s| parse(s).unwrap()).collect();
        let mut all = lint_corpus(&fs, &[]);
        for f in &fs {
            all.extend(lint_formula(f));
        }
        assert!(all
            .iter()
            .all(|d| !matches!(d.kind, ErrorKind::IncorrectQuantifier | ErrorKind::PredicateError)));
    }

    #[test]
    fn histogram_counts() {
        assert!(taxonomy_report(&[]).is_empty());
        let mk = |k| Diagnostic::new(k, Span::default(), "");
        let h = taxonomy_report(&[
            mk(ErrorKind::MissingQuantifier),
            mk(ErrorKind::MissingQuantifier),
            mk(ErrorKind::SpecialToken),
        ]);
        assert_eq!(h.total(), 3);
        let json = serde_json::to_string(&h).unwrap();
        assert_eq!(json, r#"{"Token/SpecialToken":1,"Type/MissingQuantifier":2}"#);
        let back: Histogram = serde_json::from_str(&json).unwrap();
        assert_eq!(back, h);
        assert_eq!(
            h.to_csv(),
            "category,kind,count\nType,MissingQuantifier,2\nToken,SpecialToken,1\n"
        );
    }

    #[test]
    fn predicate_decl_parsing() {
        let d = PredicateDecl::parse("Dog($x) ::: x is a dog").unwrap();
        assert_eq!(d.to_string(), "Dog(x)");
        assert_eq!(d.arity, 1);
        assert_eq!(PredicateDecl::with_arity("R", 3).to_string(), "R(x, y, z)");
    }
}
