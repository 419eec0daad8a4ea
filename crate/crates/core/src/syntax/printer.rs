//! Canonical printing in Unicode or Prover9 ASCII notation.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::ast::{Connective, Formula, QuantifierKind};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrintStyle {
    #[default]
    Unicode,
    /// Prover9 spelling. Exclusive-or has no ASCII operator and is expanded.
    Ascii,
}

/// Printed text plus the byte range of every quantifier block, including the
/// space that separates it from its body.
#[derive(Clone, Debug)]
pub struct Printed {
    pub text: String,
    pub quantifier_blocks: Vec<Range<usize>>,
}

pub fn print(f: &Formula, style: PrintStyle) -> String {
    print_annotated(f, style).text
}

pub fn print_annotated(f: &Formula, style: PrintStyle) -> Printed {
    let mut p = Printer {
        style,
        out: String::new(),
        blocks: Vec::new(),
    };
    p.formula(f);
    Printed {
        text: p.out,
        quantifier_blocks: p.blocks,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

struct Printer {
    style: PrintStyle,
    out: String,
    blocks: Vec<Range<usize>>,
}

fn open_ended(f: &Formula) -> bool {
    match f {
        Formula::Quantified(_) => true,
        Formula::Not(g) => open_ended(g),
        _ => false,
    }
}

impl Printer {
    fn ascii(&self) -> bool {
        self.style == PrintStyle::Ascii
    }

    fn op(&self, c: Connective) -> &'static str {
        match (c, self.style) {
            (Connective::And, PrintStyle::Unicode) => " ∧ ",
            (Connective::Or, PrintStyle::Unicode) => " ∨ ",
            (Connective::Implies, PrintStyle::Unicode) => " → ",
            (Connective::Iff, PrintStyle::Unicode) => " ↔ ",
            (Connective::Xor, PrintStyle::Unicode) => " ⊕ ",
            (Connective::And, PrintStyle::Ascii) => " & ",
            (Connective::Or, PrintStyle::Ascii) => " | ",
            (Connective::Implies, PrintStyle::Ascii) => " -> ",
            (Connective::Iff, PrintStyle::Ascii) => " <-> ",
            (Connective::Xor, PrintStyle::Ascii) => unreachable!("xor is expanded in ascii"),
        }
    }

    fn not(&self) -> &'static str {
        if self.ascii() {
            "-"
        } else {
            "¬"
        }
    }

    fn self_wrapped(&self, f: &Formula) -> bool {
        self.ascii() && matches!(f, Formula::Binary(Connective::Xor, ..))
    }

    fn formula(&mut self, f: &Formula) {
        match f {
            Formula::Atom(a) => {
                use std::fmt::Write;
                write!(self.out, "{a}").expect("writing to a string");
            }
            Formula::Not(g) => {
                self.out.push_str(self.not());
                if matches!(**g, Formula::Binary(..)) && !self.self_wrapped(g) {
                    self.wrapped(g);
                } else {
                    self.formula(g);
                }
            }
            Formula::Binary(Connective::Xor, l, r) if self.ascii() => {
                self.out.push_str("((");
                self.child(l, Side::Left, Connective::Or);
                self.out.push_str(" | ");
                self.child(r, Side::Right, Connective::Or);
                self.out.push_str(") & -(");
                self.child(l, Side::Left, Connective::And);
                self.out.push_str(" & ");
                self.child(r, Side::Right, Connective::And);
                self.out.push_str("))");
            }
            Formula::Binary(op, l, r) => {
                self.child(l, Side::Left, *op);
                self.out.push_str(self.op(*op));
                self.child(r, Side::Right, *op);
            }
            Formula::Quantified(q) => {
                let start = self.out.len();
                let sym = match (q.kind, self.style) {
                    (QuantifierKind::Forall, PrintStyle::Unicode) => "∀",
                    (QuantifierKind::Exists, PrintStyle::Unicode) => "∃",
                    (QuantifierKind::Forall, PrintStyle::Ascii) => "all ",
                    (QuantifierKind::Exists, PrintStyle::Ascii) => "exists ",
                };
                self.out.push_str(sym);
                self.out.push_str(&q.vars.join(","));
                self.out.push(' ');
                self.blocks.push(start..self.out.len());
                if matches!(*q.body, Formula::Quantified(_)) {
                    self.formula(&q.body);
                } else {
                    self.wrapped(&q.body);
                }
            }
        }
    }

    fn wrapped(&mut self, f: &Formula) {
        self.out.push('(');
        self.formula(f);
        self.out.push(')');
    }

    fn child(&mut self, c: &Formula, side: Side, parent: Connective) {
        let wrap = match c {
            Formula::Binary(op, ..) => {
                if self.self_wrapped(c) {
                    false
                } else {
                    let chain =
                        side == Side::Right && *op == parent && matches!(parent, Connective::And | Connective::Or);
                    !chain
                }
            }
            _ => side == Side::Left && open_ended(c),
        };
        if wrap {
            self.wrapped(c);
        } else {
            self.formula(c);
        }
    }
}
