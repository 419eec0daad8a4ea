//! Abstract syntax for first-order formulas.
//!
//! Nodes that come from source text carry a [`Span`]. Spans are ignored by
//! equality, so a parsed formula compares equal to one built by hand.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::Serialize;

/// Byte range into the source text a node was parsed from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Variable(String),
    Constant(String),
    Function(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Variable(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Term {
        Term::Constant(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Variable(n) | Term::Constant(n) | Term::Function(n, _) => n,
        }
    }

    /// Nesting depth of function application; constants and variables are 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Function(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Variable(_) => false,
            Term::Constant(_) => true,
            Term::Function(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn variables(&self, out: &mut Vec<String>) {
        match self {
            Term::Variable(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Constant(_) => {}
            Term::Function(_, args) => args.iter().for_each(|a| a.variables(out)),
        }
    }

    pub fn substitute(&self, map: &BTreeMap<String, Term>) -> Term {
        match self {
            Term::Variable(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Constant(_) => self.clone(),
            Term::Function(f, args) => Term::Function(f.clone(), args.iter().map(|a| a.substitute(map)).collect()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Variable(n) | Term::Constant(n) => f.write_str(n),
            Term::Function(n, args) => {
                write!(f, "{n}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A predicate applied to terms. Zero arguments is a propositional atom.
#[derive(Clone, Debug)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
    pub span: Span,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Atom {
        Atom {
            predicate: predicate.into(),
            args,
            span: Span::default(),
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn substitute(&self, map: &BTreeMap<String, Term>) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|a| a.substitute(map)).collect(),
            span: self.span,
        }
    }
}

impl PartialEq for Atom {
    fn eq(&self, other: &Self) -> bool {
        self.predicate == other.predicate && self.args == other.args
    }
}

impl Eq for Atom {}

impl Hash for Atom {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.predicate.hash(state);
        self.args.hash(state);
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.predicate, &self.args).cmp(&(&other.predicate, &other.args))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QuantifierKind {
    Forall,
    Exists,
}

impl QuantifierKind {
    pub fn dual(self) -> Self {
        match self {
            QuantifierKind::Forall => QuantifierKind::Exists,
            QuantifierKind::Exists => QuantifierKind::Forall,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connective {
    And,
    Or,
    Implies,
    Iff,
    Xor,
}

/// One quantifier block, `∀x,y body`.
#[derive(Clone, Debug)]
pub struct Quantified {
    pub kind: QuantifierKind,
    pub vars: Vec<String>,
    pub body: Box<Formula>,
    /// Span of the quantifier symbol and its variable list.
    pub span: Span,
}

impl PartialEq for Quantified {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.vars == other.vars && self.body == other.body
    }
}

impl Eq for Quantified {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    Binary(Connective, Box<Formula>, Box<Formula>),
    Quantified(Quantified),
}

impl Formula {
    pub fn atom(predicate: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Atom(Atom::new(predicate, args))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn binary(op: Connective, l: Formula, r: Formula) -> Formula {
        Formula::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::binary(Connective::And, l, r)
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::binary(Connective::Or, l, r)
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::binary(Connective::Implies, l, r)
    }

    pub fn iff(l: Formula, r: Formula) -> Formula {
        Formula::binary(Connective::Iff, l, r)
    }

    pub fn xor(l: Formula, r: Formula) -> Formula {
        Formula::binary(Connective::Xor, l, r)
    }

    pub fn quantified<S: Into<String>>(
        kind: QuantifierKind,
        vars: impl IntoIterator<Item = S>,
        body: Formula,
    ) -> Formula {
        Formula::Quantified(Quantified {
            kind,
            vars: vars.into_iter().map(Into::into).collect(),
            body: Box::new(body),
            span: Span::default(),
        })
    }

    pub fn forall<S: Into<String>>(vars: impl IntoIterator<Item = S>, body: Formula) -> Formula {
        Formula::quantified(QuantifierKind::Forall, vars, body)
    }

    pub fn exists<S: Into<String>>(vars: impl IntoIterator<Item = S>, body: Formula) -> Formula {
        Formula::quantified(QuantifierKind::Exists, vars, body)
    }

    /// Visits every atom in left-to-right source order.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Formula::Atom(a) => out.push(a),
            Formula::Not(f) => f.collect_atoms(out),
            Formula::Binary(_, l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
            Formula::Quantified(q) => q.body.collect_atoms(out),
        }
    }

    /// Predicate signatures `(name, arity)` in order of first occurrence.
    pub fn predicates(&self) -> Vec<(String, usize)> {
        let mut out: Vec<(String, usize)> = Vec::new();
        for a in self.atoms() {
            let key = (a.predicate.clone(), a.arity());
            if !out.contains(&key) {
                out.push(key);
            }
        }
        out
    }

    /// Constant symbols appearing anywhere, including inside function terms.
    pub fn constants(&self) -> BTreeSet<String> {
        fn walk(t: &Term, out: &mut BTreeSet<String>) {
            match t {
                Term::Constant(c) => {
                    out.insert(c.clone());
                }
                Term::Variable(_) => {}
                Term::Function(_, args) => args.iter().for_each(|a| walk(a, out)),
            }
        }
        let mut out = BTreeSet::new();
        for a in self.atoms() {
            a.args.iter().for_each(|t| walk(t, &mut out));
        }
        out
    }

    /// Every symbol name used: predicates, functions, constants and variables.
    pub fn symbols(&self) -> BTreeSet<String> {
        fn walk(t: &Term, out: &mut BTreeSet<String>) {
            out.insert(t.name().to_string());
            if let Term::Function(_, args) = t {
                args.iter().for_each(|a| walk(a, out));
            }
        }
        let mut out = BTreeSet::new();
        for a in self.atoms() {
            out.insert(a.predicate.clone());
            a.args.iter().for_each(|t| walk(t, &mut out));
        }
        self.visit_quantifiers(&mut |q| out.extend(q.vars.iter().cloned()));
        out
    }

    pub fn visit_quantifiers<'a>(&'a self, f: &mut impl FnMut(&'a Quantified)) {
        match self {
            Formula::Atom(_) => {}
            Formula::Not(g) => g.visit_quantifiers(f),
            Formula::Binary(_, l, r) => {
                l.visit_quantifiers(f);
                r.visit_quantifiers(f);
            }
            Formula::Quantified(q) => {
                f(q);
                q.body.visit_quantifiers(f);
            }
        }
    }

    pub fn quantifier_count(&self) -> usize {
        let mut n = 0;
        self.visit_quantifiers(&mut |_| n += 1);
        n
    }

    /// Variables occurring outside any binding quantifier.
    pub fn free_variables(&self) -> BTreeSet<String> {
        self.free_variables_ordered().into_iter().collect()
    }

    /// Free variables in order of first occurrence.
    pub fn free_variables_ordered(&self) -> Vec<String> {
        fn walk(f: &Formula, bound: &mut Vec<String>, out: &mut Vec<String>) {
            match f {
                Formula::Atom(a) => {
                    let mut vs = Vec::new();
                    a.args.iter().for_each(|t| t.variables(&mut vs));
                    for v in vs {
                        if !bound.contains(&v) && !out.contains(&v) {
                            out.push(v);
                        }
                    }
                }
                Formula::Not(g) => walk(g, bound, out),
                Formula::Binary(_, l, r) => {
                    walk(l, bound, out);
                    walk(r, bound, out);
                }
                Formula::Quantified(q) => {
                    let n = bound.len();
                    bound.extend(q.vars.iter().cloned());
                    walk(&q.body, bound, out);
                    bound.truncate(n);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// Wraps the formula in one universal block per free variable, outermost
    /// first, in order of first occurrence.
    pub fn universal_closure(&self) -> Formula {
        let free = self.free_variables_ordered();
        free.into_iter()
            .rev()
            .fold(self.clone(), |body, v| Formula::forall([v], body))
    }

    /// Replaces every exclusive-or with `(A ∨ B) ∧ ¬(A ∧ B)`.
    pub fn expand_xor(&self) -> Formula {
        match self {
            Formula::Atom(_) => self.clone(),
            Formula::Not(g) => Formula::not(g.expand_xor()),
            Formula::Binary(Connective::Xor, l, r) => {
                let (l, r) = (l.expand_xor(), r.expand_xor());
                Formula::and(Formula::or(l.clone(), r.clone()), Formula::not(Formula::and(l, r)))
            }
            Formula::Binary(op, l, r) => Formula::binary(*op, l.expand_xor(), r.expand_xor()),
            Formula::Quantified(q) => Formula::Quantified(Quantified {
                body: Box::new(q.body.expand_xor()),
                ..q.clone()
            }),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::Not(g) => 1 + g.size(),
            Formula::Binary(_, l, r) => 1 + l.size() + r.size(),
            Formula::Quantified(q) => 1 + q.body.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::Not(g) => 1 + g.depth(),
            Formula::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
            Formula::Quantified(q) => 1 + q.body.depth(),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::print(self, super::PrintStyle::Unicode))
    }
}
