//! Herbrand instantiation of clause sets.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::time::Instant;

use super::sat::Lit;
use super::Budget;
use crate::syntax::{Atom, Clause, ClauseSet, Literal, Term};

/// Name of the element added when the clauses mention no constant.
pub const FRESH_CONSTANT: &str = "c0";

/// The budget ran out while instantiating.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Exhausted;

/// Propositional clauses over interned ground atoms. Variable `i` is
/// `atoms[i - 1]`.
#[derive(Clone, Debug, Default)]
pub struct GroundClauses {
    pub atoms: Vec<Atom>,
    pub clauses: Vec<Vec<Lit>>,
    pub universe: Vec<Term>,
}

impl GroundClauses {
    pub fn to_clauses(&self) -> Vec<Clause> {
        self.clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&l| Literal::new(l > 0, self.atoms[l.unsigned_abs() as usize - 1].clone()))
                    .collect()
            })
            .collect()
    }
}

fn collect_symbols(t: &Term, consts: &mut BTreeSet<String>, funcs: &mut BTreeSet<(String, usize)>) {
    match t {
        Term::Constant(c) => {
            consts.insert(c.clone());
        }
        Term::Variable(_) => {}
        Term::Function(f, args) => {
            funcs.insert((f.clone(), args.len()));
            args.iter().for_each(|a| collect_symbols(a, consts, funcs));
        }
    }
}

fn universe(clauses: &[Clause], extra_constants: &[String], budget: &Budget) -> Result<Vec<Term>, Exhausted> {
    let mut consts: BTreeSet<String> = extra_constants.iter().cloned().collect();
    let mut funcs = BTreeSet::new();
    for l in clauses.iter().flatten() {
        l.atom
            .args
            .iter()
            .for_each(|t| collect_symbols(t, &mut consts, &mut funcs));
    }
    if consts.is_empty() {
        consts.insert(FRESH_CONSTANT.to_string());
    }
    let mut terms: Vec<Term> = consts.into_iter().map(Term::Constant).collect();
    let mut seen: HashSet<Term> = terms.iter().cloned().collect();
    for _ in 0..budget.max_term_depth {
        let level = terms.clone();
        for (f, arity) in &funcs {
            let mut idx = vec![0usize; *arity];
            loop {
                let t = Term::Function(f.clone(), idx.iter().map(|&i| level[i].clone()).collect());
                if seen.insert(t.clone()) {
                    terms.push(t);
                    if terms.len() > budget.max_ground_clauses {
                        return Err(Exhausted);
                    }
                }
                if !advance(&mut idx, level.len()) {
                    break;
                }
            }
        }
    }
    Ok(terms)
}

/// Odometer step; false once every position has wrapped.
fn advance(idx: &mut [usize], base: usize) -> bool {
    for slot in idx.iter_mut().rev() {
        *slot += 1;
        if *slot < base {
            return true;
        }
        *slot = 0;
    }
    false
}

struct Interner {
    index: HashMap<Atom, Lit>,
    atoms: Vec<Atom>,
}

impl Interner {
    fn lit(&mut self, l: &Literal) -> Lit {
        let v = match self.index.get(&l.atom) {
            Some(&v) => v,
            None => {
                self.atoms.push(l.atom.clone());
                let v = self.atoms.len() as Lit;
                self.index.insert(l.atom.clone(), v);
                v
            }
        };
        if l.positive {
            v
        } else {
            -v
        }
    }
}

/// Instantiates every clause over the depth-bounded Herbrand universe.
/// Instances containing a term deeper than the budget allows are dropped,
/// which keeps the result a subset of the full grounding.
pub fn ground(clauses: &ClauseSet, budget: &Budget) -> Result<GroundClauses, Exhausted> {
    ground_with(clauses, &[], budget)
}

/// [`ground`] with additional constants in the universe.
pub fn ground_with(
    clauses: &ClauseSet,
    extra_constants: &[String],
    budget: &Budget,
) -> Result<GroundClauses, Exhausted> {
    let deadline = Instant::now() + std::time::Duration::from_millis(budget.wall_time_ms);
    ground_until(clauses, extra_constants, budget, deadline)
}

pub(crate) fn ground_until(
    set: &ClauseSet,
    extra_constants: &[String],
    budget: &Budget,
    deadline: Instant,
) -> Result<GroundClauses, Exhausted> {
    let universe = universe(&set.clauses, extra_constants, budget)?;
    let mut interner = Interner {
        index: HashMap::new(),
        atoms: Vec::new(),
    };
    let mut out: Vec<Vec<Lit>> = Vec::new();
    let mut seen: HashSet<Vec<Lit>> = HashSet::new();
    let mut ticks = 0u32;
    for clause in &set.clauses {
        let mut vars = Vec::new();
        for l in clause {
            l.atom.args.iter().for_each(|t| t.variables(&mut vars));
        }
        let mut idx = vec![0usize; vars.len()];
        loop {
            ticks = ticks.wrapping_add(1);
            if ticks.is_multiple_of(1024) && Instant::now() >= deadline {
                return Err(Exhausted);
            }
            let subst = vars
                .iter()
                .cloned()
                .zip(idx.iter().map(|&i| universe[i].clone()))
                .collect();
            let instance: Vec<Literal> = clause
                .iter()
                .map(|l| Literal::new(l.positive, l.atom.substitute(&subst)))
                .collect();
            let shallow = instance
                .iter()
                .all(|l| l.atom.args.iter().all(|t| t.depth() <= budget.max_term_depth));
            if shallow {
                let mut lits: Vec<Lit> = instance.iter().map(|l| interner.lit(l)).collect();
                lits.sort_by_key(|l| (l.unsigned_abs(), *l < 0));
                lits.dedup();
                let tautology = lits.windows(2).any(|w| w[0] == -w[1]);
                if !tautology && seen.insert(lits.clone()) {
                    out.push(lits);
                    if out.len() > budget.max_ground_clauses {
                        return Err(Exhausted);
                    }
                }
            }
            if !advance(&mut idx, universe.len()) {
                break;
            }
        }
    }
    Ok(GroundClauses {
        atoms: interner.atoms,
        clauses: out,
        universe,
    })
}
