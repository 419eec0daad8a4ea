//! Toolkit for natural-language-to-first-order-logic translation work:
//! parsing and printing formulas, classifying translation errors, deciding
//! entailment, filtering silver-standard corpora, incremental augmentation,
//! verifier-corpus perturbation and the stepwise inference harness.

pub mod augment;
pub mod cli;
pub mod diagnostics;
pub mod extraction;
pub mod jsonl;
pub mod perturb;
pub mod pipeline;
pub mod reasoner;
pub mod syntax;
pub mod verify;

pub use diagnostics::{Category, Diagnostic, ErrorKind, PredicateDecl, Severity};

pub use reasoner::{prove, Budget, Label, Outcome};
pub use syntax::{parse, Formula, PrintStyle};
