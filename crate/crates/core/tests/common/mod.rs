//! Random formula and instance generators shared by the property tests and
//! the acceptance harness.
#![allow(dead_code)]

use std::collections::BTreeSet;

use folforge::syntax::{Connective, Formula, QuantifierKind, Term};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

pub const VARS: [&str; 3] = ["x", "y", "z"];
pub const CONSTANTS: [&str; 3] = ["a", "b", "c"];

/// Deterministic draws from a strategy, for harnesses without a runner.
pub fn sample<S: Strategy>(strategy: &S, n: usize, seed: u8) -> Vec<S::Value> {
    let mut runner = TestRunner::new_with_rng(Config::default(), TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]));
    (0..n)
        .map(|_| {
            strategy
                .new_tree(&mut runner)
                .expect("strategy yields values")
                .current()
        })
        .collect()
}

pub struct Vocabulary {
    pub constants: Vec<&'static str>,
    pub functions: bool,
}

fn term(v: &Vocabulary) -> BoxedStrategy<Term> {
    let mut names: Vec<Term> = VARS.iter().map(|x| Term::var(*x)).collect();
    names.extend(v.constants.iter().map(|c| Term::constant(*c)));
    let leaf = proptest::sample::select(names);
    if v.functions {
        prop_oneof![
            4 => leaf.clone(),
            1 => leaf.prop_map(|t| Term::Function("f".into(), vec![t])),
        ]
        .boxed()
    } else {
        leaf.boxed()
    }
}

fn atom(v: &Vocabulary) -> BoxedStrategy<Formula> {
    let t = term(v);
    prop_oneof![
        t.clone().prop_map(|a| Formula::atom("P", vec![a])),
        t.clone().prop_map(|a| Formula::atom("Q", vec![a])),
        (t.clone(), t).prop_map(|(a, b)| Formula::atom("R", vec![a, b])),
    ]
    .boxed()
}

fn connective() -> impl Strategy<Value = Connective> {
    proptest::sample::select(vec![
        Connective::And,
        Connective::Or,
        Connective::Implies,
        Connective::Iff,
        Connective::Xor,
    ])
}

fn quantifier_vars() -> impl Strategy<Value = Vec<String>> {
    proptest::sample::select(vec![vec!["x"], vec!["y"], vec!["z"], vec!["x", "y"]])
        .prop_map(|vs| vs.into_iter().map(String::from).collect())
}

/// Arbitrary formulas (free variables and vacuous quantifiers included)
/// with at most `depth` levels of connectives and quantifiers.
pub fn formula(v: Vocabulary, depth: u32) -> BoxedStrategy<Formula> {
    atom(&v)
        .prop_recursive(depth, 64, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (connective(), inner.clone(), inner.clone()).prop_map(|(op, l, r)| Formula::binary(op, l, r)),
                (any::<bool>(), quantifier_vars(), inner).prop_map(|(all, vars, body)| {
                    let kind = if all {
                        QuantifierKind::Forall
                    } else {
                        QuantifierKind::Exists
                    };
                    Formula::quantified(kind, vars, body)
                }),
            ]
        })
        .boxed()
}

pub fn any_formula() -> BoxedStrategy<Formula> {
    formula(
        Vocabulary {
            constants: CONSTANTS.to_vec(),
            functions: true,
        },
        6,
    )
}

/// Drops vacuous and shadowing quantifier variables, then closes the
/// formula universally.
pub fn clean(f: &Formula) -> Formula {
    fn walk(f: &Formula, scope: &mut Vec<String>) -> Formula {
        match f {
            Formula::Atom(_) => f.clone(),
            Formula::Not(g) => Formula::not(walk(g, scope)),
            Formula::Binary(op, l, r) => Formula::binary(*op, walk(l, scope), walk(r, scope)),
            Formula::Quantified(q) => {
                let free: BTreeSet<String> = q.body.free_variables();
                let mut kept: Vec<String> = Vec::new();
                for v in &q.vars {
                    if !scope.contains(v) && free.contains(v) && !kept.contains(v) {
                        kept.push(v.clone());
                    }
                }
                let before = scope.len();
                scope.extend(kept.iter().cloned());
                let body = walk(&q.body, scope);
                scope.truncate(before);
                if kept.is_empty() {
                    body
                } else {
                    Formula::quantified(q.kind, kept, body)
                }
            }
        }
    }
    walk(f, &mut Vec::new()).universal_closure()
}

fn lint_clean(f: &Formula) -> bool {
    folforge::diagnostics::lint_formula(f).is_empty()
        && folforge::diagnostics::lint_corpus(std::slice::from_ref(f), &[]).is_empty()
}

/// Closed formulas with no diagnostics of any severity.
pub fn clean_formula(v: Vocabulary, depth: u32) -> BoxedStrategy<Formula> {
    formula(v, depth)
        .prop_map(|f| clean(&f))
        .prop_filter("lint-clean", lint_clean)
        .boxed()
}

/// Function-free entailment instance: premises and a conclusion over at
/// most three constants and the predicates P/1, Q/1 and R/2.
pub fn instance() -> BoxedStrategy<(Vec<Formula>, Formula)> {
    (1usize..=3)
        .prop_flat_map(|k| {
            let f = formula(
                Vocabulary {
                    constants: CONSTANTS[..k].to_vec(),
                    functions: false,
                },
                3,
            )
            .prop_map(|f| clean(&f));
            (proptest::collection::vec(f.clone(), 1..=4), f)
        })
        .boxed()
}
