//! Recovery of structured translations from free-form generator output.
//!
//! The expected layout is
//!
//! ```text
//! Predicates:
//! Rabbit(x) ::: x is a rabbit.
//! Premises:
//! Rabbit(rex) ::: Rex is a rabbit.
//! Conclusion:
//! Furry(rex) ::: Rex is furry.
//! ```
//!
//! Enumeration markers, prose lines and anything after the conclusion pair
//! are discarded. When the layout appears more than once the last block
//! with the expected premise count wins.

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{Diagnostic, ErrorKind};
use crate::syntax::Span;

pub const SEPARATOR: &str = ":::";

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pair {
    pub nl: String,
    pub fol: String,
}

impl Pair {
    pub fn new(fol: impl Into<String>, nl: impl Into<String>) -> Self {
        Pair {
            nl: nl.into(),
            fol: fol.into(),
        }
    }

    /// `fol ::: nl`, or just the formula when there is no sentence.
    pub fn line(&self) -> String {
        if self.nl.is_empty() {
            self.fol.clone()
        } else {
            format!("{} {SEPARATOR} {}", self.fol, self.nl)
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Translation {
    pub predicates: Vec<String>,
    pub premises: Vec<Pair>,
    pub conclusion: Pair,
}

impl Translation {
    /// Renders the canonical block layout; [`extract`] inverts it.
    pub fn render(&self) -> String {
        let mut out = render_predicates(&self.predicates);
        out.push_str("\nPremises:");
        for p in &self.premises {
            out.push('\n');
            out.push_str(&p.line());
        }
        out.push_str("\nConclusion:\n");
        out.push_str(&self.conclusion.line());
        out
    }

    pub fn fols(&self) -> impl Iterator<Item = &str> {
        self.premises
            .iter()
            .chain(std::iter::once(&self.conclusion))
            .map(|p| p.fol.as_str())
    }
}

pub fn render_predicates(predicates: &[String]) -> String {
    let mut out = String::from("Predicates:");
    for p in predicates {
        out.push('\n');
        out.push_str(p);
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Predicates,
    Premises,
    Conclusion,
}

static ENUMERATION: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(?:\(?\d+[.):]|[*•]|-(?:\s)|[A-Za-z][.)]\s)\s*").expect("valid regex"));

static HEADER: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)^[#*\s]*(predicates|premises|conclusions?)[*\s]*:[*\s]*(.*)$").expect("valid regex")
});

/// Removes a leading list marker such as `1.`, `(2)`, `-` or `*`.
pub fn strip_enumeration(line: &str) -> &str {
    let t = line.trim();
    match ENUMERATION.find(t) {
        Some(m) => t[m.end()..].trim_start(),
        None => t,
    }
}

/// Splits `fol ::: nl` into a pair. `None` when the separator is missing or
/// the formula side is empty.
pub fn split_pair(line: &str) -> Option<Pair> {
    let line = strip_enumeration(line);
    let (fol, nl) = line.split_once(SEPARATOR)?;
    let fol = fol.trim();
    if fol.is_empty() {
        return None;
    }
    Some(Pair::new(fol, nl.trim()))
}

fn looks_like_predicate(line: &str) -> bool {
    let head = line.split(SEPARATOR).next().unwrap_or("").trim();
    let Some(open) = head.find('(') else {
        return false;
    };
    open > 0 && head.ends_with(')') && head[..open].chars().all(|c| c.is_alphanumeric() || c == '_')
}

/// Predicate declarations in a predicate-step output, without descriptions.
pub fn extract_predicates(raw: &str) -> Vec<String> {
    raw.lines()
        .map(strip_enumeration)
        .filter_map(|l| match HEADER.captures(l) {
            Some(c) => c.get(2).map(|m| m.as_str().trim()).filter(|s| !s.is_empty()),
            None => Some(l),
        })
        .filter(|l| looks_like_predicate(l))
        .map(|l| l.split(SEPARATOR).next().unwrap_or("").trim().to_string())
        .collect()
}

/// The single formula of a one-statement step: the first `fol ::: nl` line,
/// else the first nonempty line that is not a section header.
pub fn extract_formula(raw: &str) -> Option<Pair> {
    let lines: Vec<&str> = raw
        .lines()
        .map(|l| match HEADER.captures(l) {
            Some(c) => c.get(2).map_or("", |m| m.as_str()),
            None => l,
        })
        .map(strip_enumeration)
        .filter(|l| !l.is_empty())
        .collect();
    lines
        .iter()
        .find_map(|l| split_pair(l))
        .or_else(|| lines.first().map(|l| Pair::new(*l, "")))
}

#[derive(Default)]
struct Block {
    predicates: Vec<String>,
    saw_predicates: bool,
    saw_premises: bool,
    premises: Vec<Pair>,
    conclusions: Vec<Pair>,
    closed: bool,
}

impl Block {
    fn complete(&self) -> bool {
        self.saw_predicates && self.saw_premises && !self.conclusions.is_empty()
    }
}

fn scan(raw: &str) -> Vec<Block> {
    let mut blocks: Vec<Block> = Vec::new();
    let mut section: Option<Section> = None;
    for raw_line in raw.lines() {
        let mut line = strip_enumeration(raw_line);
        if let Some(c) = HEADER.captures(line) {
            let name = c[1].to_lowercase();
            let next = if name == "predicates" {
                Section::Predicates
            } else if name == "premises" {
                Section::Premises
            } else {
                Section::Conclusion
            };
            let need_new = match blocks.last() {
                None => true,
                Some(b) => match next {
                    Section::Predicates => true,
                    Section::Premises => b.saw_premises || !b.conclusions.is_empty(),
                    Section::Conclusion => !b.conclusions.is_empty(),
                },
            };
            if need_new {
                blocks.push(Block::default());
            }
            let b = blocks.last_mut().expect("a block exists");
            match next {
                Section::Predicates => b.saw_predicates = true,
                Section::Premises => b.saw_premises = true,
                Section::Conclusion => {}
            }
            section = Some(next);
            line = c.get(2).map_or("", |m| m.as_str()).trim();
            if line.is_empty() {
                continue;
            }
        }
        let (Some(sec), Some(b)) = (section, blocks.last_mut()) else {
            continue;
        };
        match sec {
            Section::Predicates => {
                if looks_like_predicate(line) {
                    b.predicates
                        .push(line.split(SEPARATOR).next().unwrap_or("").trim().to_string());
                }
            }
            Section::Premises => {
                if let Some(p) = split_pair(line) {
                    b.premises.push(p);
                }
            }
            Section::Conclusion => {
                if b.closed {
                    continue;
                }
                match split_pair(line) {
                    Some(p) => b.conclusions.push(p),
                    None if !b.conclusions.is_empty() && !line.is_empty() => b.closed = true,
                    None => {}
                }
            }
        }
    }
    blocks
}

fn completion(raw: &str, msg: String) -> Diagnostic {
    Diagnostic::new(ErrorKind::CompletionError, Span::new(0, raw.len()), msg)
}

/// Extracts a translation with exactly `expected_premises` premise pairs.
pub fn extract(raw: &str, expected_premises: usize) -> Result<Translation, Vec<Diagnostic>> {
    let blocks = scan(raw);
    let fits = |b: &&Block| b.complete() && b.premises.len() == expected_premises && b.conclusions.len() == 1;
    if let Some(b) = blocks.iter().rev().find(fits) {
        return Ok(Translation {
            predicates: b.predicates.clone(),
            premises: b.premises.clone(),
            conclusion: b.conclusions[0].clone(),
        });
    }
    let Some(b) = blocks.iter().rev().find(|b| b.complete()).or(blocks.last()) else {
        return Err(vec![completion(
            raw,
            "no Predicates/Premises/Conclusion sections found".into(),
        )]);
    };
    let mut diags = Vec::new();
    for (seen, name) in [(b.saw_predicates, "Predicates"), (b.saw_premises, "Premises")] {
        if !seen {
            diags.push(completion(raw, format!("missing `{name}:` section")));
        }
    }
    if b.premises.len() != expected_premises {
        diags.push(completion(
            raw,
            format!(
                "expected {expected_premises} premise translations, found {}",
                b.premises.len()
            ),
        ));
    }
    if b.conclusions.len() != 1 {
        diags.push(completion(
            raw,
            format!("expected 1 conclusion translation, found {}", b.conclusions.len()),
        ));
    }
    Err(diags)
}
