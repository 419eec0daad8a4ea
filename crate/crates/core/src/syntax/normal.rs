//! Clausal normal form: connective elimination, negation normal form,
//! renaming apart, skolemization and distribution into clauses.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::ast::{Atom, Connective, Formula, QuantifierKind, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn new(positive: bool, atom: Atom) -> Self {
        Literal { positive, atom }
    }

    pub fn negated(&self) -> Self {
        Literal {
            positive: !self.positive,
            atom: self.atom.clone(),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("¬")?;
        }
        write!(f, "{}", self.atom)
    }
}

/// Disjunction of literals. Variables are implicitly universal.
pub type Clause = Vec<Literal>;

/// Where a skolem symbol came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkolemOrigin {
    /// Existential variable the symbol replaces.
    pub variable: String,
    /// Number of enclosing universals, 0 for a skolem constant.
    pub arity: usize,
    /// Index of the input formula.
    pub formula: usize,
    /// Pre-order index of the quantifier block inside that formula.
    pub quantifier: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClauseSet {
    pub clauses: Vec<Clause>,
    pub skolem_map: BTreeMap<String, SkolemOrigin>,
}

impl ClauseSet {
    /// Rebuilds a closed formula equivalent to the clause set.
    /// `None` for the empty (trivially true) set.
    pub fn as_formula(&self) -> Option<Formula> {
        let mut clauses = self.clauses.iter().map(|c| {
            let disj = c
                .iter()
                .map(|l| {
                    let a = Formula::Atom(l.atom.clone());
                    if l.positive {
                        a
                    } else {
                        Formula::not(a)
                    }
                })
                .reduce(Formula::or)
                .expect("clauses are nonempty");
            disj.universal_closure()
        });
        let first = clauses.next()?;
        Some(clauses.fold(first, Formula::and))
    }
}

impl fmt::Display for ClauseSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{ ")?;
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for (j, l) in c.iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{l}")?;
            }
            f.write_str("]")?;
        }
        f.write_str(" }")
    }
}

enum Nnf {
    Lit(Literal),
    And(Box<Nnf>, Box<Nnf>),
    Or(Box<Nnf>, Box<Nnf>),
    Quant(QuantifierKind, Vec<String>, Box<Nnf>),
}

fn and(a: Nnf, b: Nnf) -> Nnf {
    Nnf::And(Box::new(a), Box::new(b))
}

fn or(a: Nnf, b: Nnf) -> Nnf {
    Nnf::Or(Box::new(a), Box::new(b))
}

fn nnf(f: &Formula, positive: bool) -> Nnf {
    match f {
        Formula::Atom(a) => Nnf::Lit(Literal::new(positive, a.clone())),
        Formula::Not(g) => nnf(g, !positive),
        Formula::Binary(op, l, r) => match (op, positive) {
            (Connective::And, true) => and(nnf(l, true), nnf(r, true)),
            (Connective::And, false) => or(nnf(l, false), nnf(r, false)),
            (Connective::Or, true) => or(nnf(l, true), nnf(r, true)),
            (Connective::Or, false) => and(nnf(l, false), nnf(r, false)),
            (Connective::Implies, true) => or(nnf(l, false), nnf(r, true)),
            (Connective::Implies, false) => and(nnf(l, true), nnf(r, false)),
            // A ↔ B  ≡  (¬A ∨ B) ∧ (A ∨ ¬B);   A ⊕ B  ≡  (A ∨ B) ∧ (¬A ∨ ¬B)
            (Connective::Iff, true) | (Connective::Xor, false) => {
                and(or(nnf(l, false), nnf(r, true)), or(nnf(l, true), nnf(r, false)))
            }
            (Connective::Iff, false) | (Connective::Xor, true) => {
                and(or(nnf(l, true), nnf(r, true)), or(nnf(l, false), nnf(r, false)))
            }
        },
        Formula::Quantified(q) => {
            let kind = if positive { q.kind } else { q.kind.dual() };
            Nnf::Quant(kind, q.vars.clone(), Box::new(nnf(&q.body, positive)))
        }
    }
}

struct Skolemizer<'a> {
    reserved: &'a BTreeSet<String>,
    used_vars: BTreeSet<String>,
    next_skolem: usize,
    skolem_map: BTreeMap<String, SkolemOrigin>,
    formula: usize,
    quantifier: usize,
}

impl Skolemizer<'_> {
    fn fresh_skolem(&mut self) -> String {
        loop {
            self.next_skolem += 1;
            let name = format!("sk{}", self.next_skolem);
            if !self.reserved.contains(&name) {
                return name;
            }
        }
    }

    fn fresh_var(&mut self, base: &str) -> String {
        if self.used_vars.insert(base.to_string()) {
            return base.to_string();
        }
        let mut n = 1;
        loop {
            let name = format!("{base}{n}");
            if !self.reserved.contains(&name) && self.used_vars.insert(name.clone()) {
                return name;
            }
            n += 1;
        }
    }

    /// Removes quantifiers: universals become renamed-apart variables,
    /// existentials become skolem terms over the enclosing universals.
    fn run(&mut self, f: Nnf, universals: &mut Vec<String>, env: &mut BTreeMap<String, Term>) -> Nnf {
        match f {
            Nnf::Lit(l) => Nnf::Lit(Literal::new(l.positive, l.atom.substitute(env))),
            Nnf::And(a, b) => {
                let a = self.run(*a, universals, env);
                and(a, self.run(*b, universals, env))
            }
            Nnf::Or(a, b) => {
                let a = self.run(*a, universals, env);
                or(a, self.run(*b, universals, env))
            }
            Nnf::Quant(kind, vars, body) => {
                let qidx = self.quantifier;
                self.quantifier += 1;
                let saved: Vec<(String, Option<Term>)> =
                    vars.iter().map(|v| (v.clone(), env.get(v).cloned())).collect();
                let depth = universals.len();
                for v in &vars {
                    let term = match kind {
                        QuantifierKind::Forall => {
                            let name = self.fresh_var(v);
                            universals.push(name.clone());
                            Term::Variable(name)
                        }
                        QuantifierKind::Exists => {
                            let sk = self.fresh_skolem();
                            self.skolem_map.insert(
                                sk.clone(),
                                SkolemOrigin {
                                    variable: v.clone(),
                                    arity: universals.len(),
                                    formula: self.formula,
                                    quantifier: qidx,
                                },
                            );
                            if universals.is_empty() {
                                Term::Constant(sk)
                            } else {
                                Term::Function(sk, universals.iter().cloned().map(Term::Variable).collect())
                            }
                        }
                    };
                    env.insert(v.clone(), term);
                }
                let out = self.run(*body, universals, env);
                universals.truncate(depth);
                for (v, old) in saved {
                    match old {
                        Some(t) => env.insert(v, t),
                        None => env.remove(&v),
                    };
                }
                out
            }
        }
    }
}

fn distribute(f: Nnf) -> Vec<Clause> {
    match f {
        Nnf::Lit(l) => vec![vec![l]],
        Nnf::And(a, b) => {
            let mut out = distribute(*a);
            out.extend(distribute(*b));
            out
        }
        Nnf::Or(a, b) => {
            let left = distribute(*a);
            let right = distribute(*b);
            let mut out = Vec::with_capacity(left.len() * right.len());
            for ca in &left {
                for cb in &right {
                    let mut c = ca.clone();
                    for l in cb {
                        if !c.contains(l) {
                            c.push(l.clone());
                        }
                    }
                    out.push(c);
                }
            }
            out
        }
        Nnf::Quant(..) => unreachable!("quantifiers are removed before distribution"),
    }
}

fn is_tautology(c: &Clause) -> bool {
    c.iter().any(|l| c.contains(&l.negated()))
}

/// Clausifies a single formula. Free variables are treated as universal.
pub fn clausify(f: &Formula) -> ClauseSet {
    clausify_all(std::slice::from_ref(f))
}

/// Clausifies a conjunction of formulas with one shared supply of fresh
/// skolem symbols, none of which occurs in the input.
pub fn clausify_all(formulas: &[Formula]) -> ClauseSet {
    let reserved: BTreeSet<String> = formulas.iter().flat_map(|f| f.symbols()).collect();
    let mut sk = Skolemizer {
        reserved: &reserved,
        used_vars: BTreeSet::new(),
        next_skolem: 0,
        skolem_map: BTreeMap::new(),
        formula: 0,
        quantifier: 0,
    };
    let mut clauses: Vec<Clause> = Vec::new();
    for (i, f) in formulas.iter().enumerate() {
        sk.formula = i;
        sk.quantifier = 0;
        let closed = f.universal_closure();
        let skolemized = sk.run(nnf(&closed, true), &mut Vec::new(), &mut BTreeMap::new());
        for c in distribute(skolemized) {
            if !is_tautology(&c) && !clauses.contains(&c) {
                clauses.push(c);
            }
        }
    }
    ClauseSet {
        clauses,
        skolem_map: sk.skolem_map,
    }
}
