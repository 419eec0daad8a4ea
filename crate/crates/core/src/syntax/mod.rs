//! Prover9-style first-order logic: lexing, parsing, printing and clausal
//! normal form.
//!
//! The grammar accepts Unicode (`∀ ∃ ¬ ∧ ∨ → ↔ ⊕`) and ASCII (`all exists -
//! & | -> <->`) spellings, comma-separated quantifier variable lists,
//! consecutive quantifier blocks in any order, and negation of a whole
//! quantified formula.

mod ast;
mod lexer;
mod normal;
mod parser;
mod printer;

pub use ast::{Atom, Connective, Formula, Quantified, QuantifierKind, Span, Term};
pub use lexer::{decode_unicode_escapes, tokenize, Token, TokenKind};
pub use normal::{clausify, clausify_all, Clause, ClauseSet, Literal, SkolemOrigin};
pub use parser::{is_variable_name, parse_raw, ParseError, ParseErrorKind};
pub use printer::{print, print_annotated, PrintStyle, Printed};

use crate::diagnostics::{classify_failure, Diagnostic};

/// Parses one formula. Failures are classified into the translation-error
/// taxonomy.
pub fn parse(text: &str) -> Result<Formula, Diagnostic> {
    parse_raw(text).map_err(|e| classify_failure(text, &e))
}

/// The set of variables not bound by any enclosing quantifier.
pub fn free_variables(f: &Formula) -> std::collections::BTreeSet<String> {
    f.free_variables()
}
