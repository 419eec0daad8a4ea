//! Entailment by refutation: clausify, ground over a depth-bounded Herbrand
//! universe, decide with DPLL.
//!
//! Grounding keeps only instances whose terms fit the depth bound. Those are
//! a subset of the full grounding, so an unsatisfiable result is genuine and
//! truncation can only weaken a decisive answer to `Unknown`.

mod ground;
mod oracle;
mod sat;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize, Serializer};

use crate::diagnostics::{lint_corpus, Diagnostic, ErrorKind};
use crate::syntax::{clausify_all, Formula};

pub use ground::{ground, ground_with, Exhausted, GroundClauses, FRESH_CONSTANT};
pub use oracle::{oracle_prove, oracle_satisfiable, OracleError, MAX_GROUND_ATOMS};
pub use sat::{solve, Lit, SatResult};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Budget {
    pub max_ground_clauses: usize,
    /// Deepest function nesting allowed in ground terms; 1 applies skolem
    /// functions to constants only.
    pub max_term_depth: usize,
    pub wall_time_ms: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_ground_clauses: 100_000,
            max_term_depth: 1,
            wall_time_ms: 10_000,
        }
    }
}

impl Budget {
    pub fn validate(&self) -> Result<(), String> {
        if self.max_ground_clauses == 0 || self.max_term_depth == 0 || self.wall_time_ms == 0 {
            return Err("reasoner budget values must be positive".into());
        }
        Ok(())
    }
}

/// Deductive label of a premises/conclusion pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    True,
    False,
    Unknown,
}

impl Label {
    pub fn name(self) -> &'static str {
        match self {
            Label::True => "True",
            Label::False => "False",
            Label::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "True" => Ok(Label::True),
            "False" => Ok(Label::False),
            "Unknown" | "Uncertain" => Ok(Label::Unknown),
            other => Err(format!("unknown label `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    True,
    False,
    Unknown,
    Error(Diagnostic),
    Exhausted,
}

impl Outcome {
    pub fn label(&self) -> Option<Label> {
        match self {
            Outcome::True => Some(Label::True),
            Outcome::False => Some(Label::False),
            Outcome::Unknown => Some(Label::Unknown),
            Outcome::Error(_) | Outcome::Exhausted => None,
        }
    }
}

impl From<Label> for Outcome {
    fn from(l: Label) -> Self {
        match l {
            Label::True => Outcome::True,
            Label::False => Outcome::False,
            Label::Unknown => Outcome::Unknown,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::True => f.write_str("True"),
            Outcome::False => f.write_str("False"),
            Outcome::Unknown => f.write_str("Unknown"),
            Outcome::Error(d) => write!(f, "Error:{}", d.kind),
            Outcome::Exhausted => f.write_str("Exhausted"),
        }
    }
}

impl Serialize for Outcome {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Result of [`prove_strict`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrictOutcome {
    pub outcome: Outcome,
    /// Both the conclusion and its negation follow.
    pub contradictory_premises: bool,
}

fn refutes(formulas: &[Formula], budget: &Budget, deadline: Instant) -> Result<bool, Exhausted> {
    let clauses = clausify_all(formulas);
    let g = ground::ground_until(&clauses, &[], budget, deadline)?;
    match sat::solve(g.atoms.len(), &g.clauses, Some(deadline)) {
        SatResult::Unsat => Ok(true),
        SatResult::Sat => Ok(false),
        SatResult::Exhausted => Err(Exhausted),
    }
}

fn arity_check(premises: &[Formula], conclusion: &Formula) -> Option<Diagnostic> {
    let mut all = premises.to_vec();
    all.push(conclusion.clone());
    lint_corpus(&all, &[])
        .into_iter()
        .find(|d| d.kind == ErrorKind::ArityMismatch)
}

struct Checks {
    premises: Vec<Formula>,
    conclusion: Formula,
    budget: Budget,
    deadline: Instant,
}

impl Checks {
    fn new(premises: &[Formula], conclusion: &Formula, budget: &Budget) -> Self {
        Checks {
            premises: premises.to_vec(),
            conclusion: conclusion.universal_closure(),
            budget: budget.clone(),
            deadline: Instant::now() + Duration::from_millis(budget.wall_time_ms),
        }
    }

    fn with(&self, extra: Formula) -> Result<bool, Exhausted> {
        let mut fs = self.premises.clone();
        fs.push(extra);
        refutes(&fs, &self.budget, self.deadline)
    }

    fn entails(&self) -> Result<bool, Exhausted> {
        self.with(Formula::not(self.conclusion.clone()))
    }

    fn refutes(&self) -> Result<bool, Exhausted> {
        self.with(self.conclusion.clone())
    }
}

/// Labels `conclusion` against `premises`. Free variables are read
/// universally. Inconsistent premises give `True`.
pub fn prove(premises: &[Formula], conclusion: &Formula, budget: &Budget) -> Outcome {
    if let Some(d) = arity_check(premises, conclusion) {
        return Outcome::Error(d);
    }
    let checks = Checks::new(premises, conclusion, budget);
    let run = || -> Result<Outcome, Exhausted> {
        if checks.entails()? {
            return Ok(Outcome::True);
        }
        if checks.refutes()? {
            return Ok(Outcome::False);
        }
        Ok(Outcome::Unknown)
    };
    run().unwrap_or(Outcome::Exhausted)
}

/// [`prove`] that always runs both refutations, flagging premises from
/// which the conclusion and its negation both follow.
pub fn prove_strict(premises: &[Formula], conclusion: &Formula, budget: &Budget) -> StrictOutcome {
    if let Some(d) = arity_check(premises, conclusion) {
        return StrictOutcome {
            outcome: Outcome::Error(d),
            contradictory_premises: false,
        };
    }
    let checks = Checks::new(premises, conclusion, budget);
    let both = checks.entails().and_then(|t| Ok((t, checks.refutes()?)));
    match both {
        Err(Exhausted) => StrictOutcome {
            outcome: Outcome::Exhausted,
            contradictory_premises: false,
        },
        Ok((entails, refutes)) => StrictOutcome {
            outcome: match (entails, refutes) {
                (true, _) => Outcome::True,
                (false, true) => Outcome::False,
                (false, false) => Outcome::Unknown,
            },
            contradictory_premises: entails && refutes,
        },
    }
}
