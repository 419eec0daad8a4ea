//! Finite-model reference decision procedure.
//!
//! Works directly on formulas: quantifiers are expanded over a finite domain
//! and every truth assignment to the resulting ground atoms is enumerated.
//! It shares nothing with clausification or the SAT solver, so the two can
//! check each other.
//!
//! The domain holds every constant plus one anonymous element per
//! existential witness the formulas can require. For function-free input
//! without existentials under universals that is as large as the Herbrand
//! universe of the skolemized form, which suffices for satisfiability.

use std::collections::HashMap;
use std::fmt;

use super::Outcome;
use crate::syntax::{Connective, Formula, QuantifierKind, Term};

pub const MAX_GROUND_ATOMS: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleError {
    FunctionTerm(String),
    /// An existential witness would depend on an enclosing universal.
    DependentExistential(String),
    TooManyAtoms(usize),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::FunctionTerm(t) => write!(f, "function term `{t}` is out of scope"),
            OracleError::DependentExistential(v) => {
                write!(f, "existential `{v}` is nested under a universal")
            }
            OracleError::TooManyAtoms(n) => {
                write!(f, "{n} ground atoms exceed the limit of {MAX_GROUND_ATOMS}")
            }
        }
    }
}

impl std::error::Error for OracleError {}

/// Which quantifier readings a subformula can take after pushing negations
/// inward. Under `↔` and `⊕` both polarities occur.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Polarity {
    Pos,
    Neg,
    Both,
}

impl Polarity {
    fn flip(self) -> Self {
        match self {
            Polarity::Pos => Polarity::Neg,
            Polarity::Neg => Polarity::Pos,
            Polarity::Both => Polarity::Both,
        }
    }

    fn existential(self, kind: QuantifierKind) -> bool {
        matches!(
            (self, kind),
            (Polarity::Both, _) | (Polarity::Pos, QuantifierKind::Exists) | (Polarity::Neg, QuantifierKind::Forall)
        )
    }

    fn universal(self, kind: QuantifierKind) -> bool {
        self.existential(kind.dual())
    }
}

/// Number of existential witnesses after full expansion of `↔`/`⊕`, and a
/// check that none of them sits under a universal.
fn witnesses(f: &Formula, pol: Polarity, under_universal: bool) -> Result<usize, OracleError> {
    match f {
        Formula::Atom(a) => {
            for t in &a.args {
                if let Term::Function(..) = t {
                    return Err(OracleError::FunctionTerm(t.to_string()));
                }
            }
            Ok(0)
        }
        Formula::Not(g) => witnesses(g, pol.flip(), under_universal),
        Formula::Binary(op, l, r) => match op {
            Connective::And | Connective::Or => {
                Ok(witnesses(l, pol, under_universal)? + witnesses(r, pol, under_universal)?)
            }
            Connective::Implies => Ok(witnesses(l, pol.flip(), under_universal)? + witnesses(r, pol, under_universal)?),
            Connective::Iff | Connective::Xor => {
                // Each side occurs once in each polarity per expanded copy.
                let copies = if pol == Polarity::Both { 2 } else { 1 };
                let l = witnesses(l, Polarity::Both, under_universal)?;
                let r = witnesses(r, Polarity::Both, under_universal)?;
                Ok(copies * (l + r))
            }
        },
        Formula::Quantified(q) => {
            let ex = pol.existential(q.kind);
            if ex && under_universal {
                return Err(OracleError::DependentExistential(q.vars.join(",")));
            }
            let n = if ex { q.vars.len() } else { 0 };
            let inner = witnesses(&q.body, pol, under_universal || pol.universal(q.kind))?;
            Ok(n + inner)
        }
    }
}

/// Propositional formula over ground-atom indices.
enum Prop {
    Var(usize),
    Not(Box<Prop>),
    And(Vec<Prop>),
    Or(Vec<Prop>),
    Implies(Box<Prop>, Box<Prop>),
    Iff(Box<Prop>, Box<Prop>),
    Xor(Box<Prop>, Box<Prop>),
}

impl Prop {
    fn eval(&self, m: u32) -> bool {
        match self {
            Prop::Var(i) => m >> i & 1 == 1,
            Prop::Not(p) => !p.eval(m),
            Prop::And(ps) => ps.iter().all(|p| p.eval(m)),
            Prop::Or(ps) => ps.iter().any(|p| p.eval(m)),
            Prop::Implies(a, b) => !a.eval(m) || b.eval(m),
            Prop::Iff(a, b) => a.eval(m) == b.eval(m),
            Prop::Xor(a, b) => a.eval(m) != b.eval(m),
        }
    }
}

struct Expander<'a> {
    domain: &'a [String],
    atoms: HashMap<(String, Vec<String>), usize>,
}

impl Expander<'_> {
    fn expand(&mut self, f: &Formula, env: &mut Vec<(String, String)>) -> Result<Prop, OracleError> {
        Ok(match f {
            Formula::Atom(a) => {
                let args: Vec<String> = a
                    .args
                    .iter()
                    .map(|t| match t {
                        Term::Variable(v) => env
                            .iter()
                            .rev()
                            .find(|(n, _)| n == v)
                            .map(|(_, e)| e.clone())
                            .unwrap_or_else(|| v.clone()),
                        other => other.to_string(),
                    })
                    .collect();
                let next = self.atoms.len();
                let idx = *self.atoms.entry((a.predicate.clone(), args)).or_insert(next);
                if idx >= MAX_GROUND_ATOMS {
                    return Err(OracleError::TooManyAtoms(idx + 1));
                }
                Prop::Var(idx)
            }
            Formula::Not(g) => Prop::Not(Box::new(self.expand(g, env)?)),
            Formula::Binary(op, l, r) => {
                let l = self.expand(l, env)?;
                let r = self.expand(r, env)?;
                match op {
                    Connective::And => Prop::And(vec![l, r]),
                    Connective::Or => Prop::Or(vec![l, r]),
                    Connective::Implies => Prop::Implies(Box::new(l), Box::new(r)),
                    Connective::Iff => Prop::Iff(Box::new(l), Box::new(r)),
                    Connective::Xor => Prop::Xor(Box::new(l), Box::new(r)),
                }
            }
            Formula::Quantified(q) => self.expand_block(q.kind, &q.vars, &q.body, env)?,
        })
    }

    fn expand_block(
        &mut self,
        kind: QuantifierKind,
        vars: &[String],
        body: &Formula,
        env: &mut Vec<(String, String)>,
    ) -> Result<Prop, OracleError> {
        let Some((v, rest)) = vars.split_first() else {
            return self.expand(body, env);
        };
        let mut parts = Vec::with_capacity(self.domain.len());
        for e in self.domain {
            env.push((v.clone(), e.clone()));
            let p = self.expand_block(kind, rest, body, env);
            env.pop();
            parts.push(p?);
        }
        Ok(match kind {
            QuantifierKind::Forall => Prop::And(parts),
            QuantifierKind::Exists => Prop::Or(parts),
        })
    }
}

/// A set of ground propositions ready for model enumeration.
struct Grounded {
    props: Vec<Prop>,
    atom_count: usize,
}

/// `both[i]` marks formulas whose negation is also checked.
fn ground_formulas(formulas: &[Formula], both: &[bool]) -> Result<Grounded, OracleError> {
    let closed: Vec<Formula> = formulas.iter().map(Formula::universal_closure).collect();
    let mut anonymous = 0;
    let mut constants = std::collections::BTreeSet::new();
    for (f, &b) in closed.iter().zip(both) {
        let pol = if b { Polarity::Both } else { Polarity::Pos };
        anonymous += witnesses(f, pol, false)?;
        constants.extend(f.constants());
    }
    let mut domain: Vec<String> = constants.into_iter().collect();
    // `#` cannot occur in a parsed identifier.
    domain.extend((1..=anonymous).map(|i| format!("#{i}")));
    if domain.is_empty() {
        domain.push("c0".to_string());
    }
    let mut ex = Expander {
        domain: &domain,
        atoms: HashMap::new(),
    };
    let props = closed
        .iter()
        .map(|f| ex.expand(f, &mut Vec::new()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Grounded {
        props,
        atom_count: ex.atoms.len(),
    })
}

fn models(g: &Grounded) -> impl Iterator<Item = u32> + '_ {
    (0u32..1 << g.atom_count).filter(|&m| g.props.iter().all(|p| p.eval(m)))
}

/// Whether the conjunction of `formulas` has a model.
pub fn oracle_satisfiable(formulas: &[Formula]) -> Result<bool, OracleError> {
    let g = ground_formulas(formulas, &vec![false; formulas.len()])?;
    let sat = models(&g).next().is_some();
    Ok(sat)
}

/// Reference entailment check with the same check order as
/// [`super::prove`]: inconsistent premises entail everything.
pub fn oracle_prove(premises: &[Formula], conclusion: &Formula) -> Result<Outcome, OracleError> {
    let mut all = premises.to_vec();
    all.push(conclusion.universal_closure());
    let mut both = vec![false; premises.len()];
    both.push(true);
    let g = ground_formulas(&all, &both)?;
    let (prem, concl) = g.props.split_at(premises.len());
    let concl = &concl[0];
    let mut seen_true = false;
    let mut seen_false = false;
    for m in (0u32..1 << g.atom_count).filter(|&m| prem.iter().all(|p| p.eval(m))) {
        if concl.eval(m) {
            seen_true = true;
        } else {
            seen_false = true;
        }
        if seen_true && seen_false {
            return Ok(Outcome::Unknown);
        }
    }
    Ok(match (seen_true, seen_false) {
        (_, false) => Outcome::True,
        (false, true) => Outcome::False,
        (true, true) => Outcome::Unknown,
    })
}
