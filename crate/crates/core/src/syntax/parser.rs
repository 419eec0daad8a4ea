//! Recursive-descent parser.
//!
//! Precedence from loosest to tightest: `↔`, `→`, `⊕`, `∨`, `∧`, then the
//! prefix forms `¬` and quantifiers. All binary connectives nest to the right.
//! A quantifier's scope extends as far right as possible, so
//! `∃y (A(y)) → B(y)` reads as `∃y ((A(y)) → B(y))`.
//!
//! An identifier in term position is a variable when a quantifier in scope
//! binds it, or when it is a single letter `u`..`z` optionally followed by
//! digits. Everything else is a constant.

use thiserror::Error;

use super::ast::{Atom, Formula, Quantified, QuantifierKind, Span, Term};
use super::lexer::{decode_unicode_escapes, tokenize, Token, TokenKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    /// Input ended while a `(` was still open.
    UnclosedParen,
    /// A `)` with no matching `(`.
    UnmatchedClose,
    SpecialToken(char),
    UnknownOperator(String),
    /// Quantifier without variables or body, repeated variable in one block,
    /// or a quantifier where a connective or `)` was expected.
    MisplacedQuantifier,
    /// A complete formula followed by more text.
    TrailingInput,
    /// Input ended where an operand was required.
    Incomplete,
    /// Operator, comma or operand in a position the grammar does not allow.
    UnexpectedToken,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{message} at bytes {}..{}", span.start, span.end)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: Span,
    pub message: String,
}

/// True for names the parser treats as variables even when unbound.
pub fn is_variable_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some('u'..='z')) && chars.all(|c| c.is_ascii_digit())
}

/// Parses one formula, reporting the leftmost blocking problem on failure.
pub fn parse_raw(text: &str) -> Result<Formula, ParseError> {
    let decoded = decode_unicode_escapes(text);
    let tokens = tokenize(&decoded);
    let mut p = Parser {
        tokens,
        pos: 0,
        end: decoded.len(),
        depth: 0,
        bound: Vec::new(),
    };
    if p.tokens.is_empty() {
        return Err(ParseError {
            kind: ParseErrorKind::Empty,
            span: Span::new(0, decoded.len()),
            message: "empty formula".into(),
        });
    }
    let f = p.formula()?;
    if let Some(tok) = p.peek().cloned() {
        let end = p.end;
        let (kind, message) = match &tok.kind {
            TokenKind::RParen => (ParseErrorKind::UnmatchedClose, "unmatched `)`".to_string()),
            TokenKind::Forall | TokenKind::Exists => (
                ParseErrorKind::MisplacedQuantifier,
                "quantifier after a complete formula".to_string(),
            ),
            TokenKind::Ident(w) if is_quantifier_word(w) && p.peek_at(1).is_some_and(is_ident) => (
                ParseErrorKind::MisplacedQuantifier,
                "quantifier after a complete formula".to_string(),
            ),
            _ => return Err(p.unexpected(&tok, "end of formula", ParseErrorKind::TrailingInput)),
        };
        return Err(ParseError {
            kind,
            span: if matches!(tok.kind, TokenKind::RParen) {
                tok.span
            } else {
                Span::new(tok.span.start, end)
            },
            message,
        });
    }
    Ok(f)
}

fn is_quantifier_word(w: &str) -> bool {
    w == "all" || w == "exists"
}

fn is_ident(t: &Token) -> bool {
    matches!(t.kind, TokenKind::Ident(_))
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
    depth: usize,
    bound: Vec<String>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, off: usize) -> Option<&Token> {
        self.tokens.get(self.pos + off)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eof_span(&self) -> Span {
        Span::new(self.end, self.end)
    }

    fn at_eof(&self, expecting: &str) -> ParseError {
        if self.depth > 0 {
            ParseError {
                kind: ParseErrorKind::UnclosedParen,
                span: self.eof_span(),
                message: format!("missing `)`: input ended while expecting {expecting}"),
            }
        } else {
            ParseError {
                kind: ParseErrorKind::Incomplete,
                span: self.eof_span(),
                message: format!("incomplete formula: expected {expecting}"),
            }
        }
    }

    /// Error for `tok` found where `expecting` was required. Tokens that are
    /// outside the alphabet are reported as such regardless of context.
    fn unexpected(&self, tok: &Token, expecting: &str, fallback: ParseErrorKind) -> ParseError {
        let (kind, message) = match &tok.kind {
            TokenKind::Special(c) => (
                ParseErrorKind::SpecialToken(*c),
                format!("special token `{c}` is not allowed"),
            ),
            TokenKind::UnknownOp(op) => (
                ParseErrorKind::UnknownOperator(op.clone()),
                format!("unknown operator `{op}`"),
            ),
            TokenKind::RParen if self.depth == 0 => (ParseErrorKind::UnmatchedClose, "unmatched `)`".to_string()),
            TokenKind::Forall | TokenKind::Exists => (
                ParseErrorKind::MisplacedQuantifier,
                format!("misplaced quantifier, expected {expecting}"),
            ),
            other => (fallback, format!("expected {expecting}, found {}", other.describe())),
        };
        ParseError {
            kind,
            span: tok.span,
            message,
        }
    }

    fn formula(&mut self) -> PResult<Formula> {
        self.iff()
    }

    fn right_assoc(
        &mut self,
        op: TokenKind,
        next: fn(&mut Self) -> PResult<Formula>,
        same: fn(&mut Self) -> PResult<Formula>,
        build: fn(Formula, Formula) -> Formula,
    ) -> PResult<Formula> {
        let left = next(self)?;
        if self.peek().is_some_and(|t| t.kind == op) {
            self.bump();
            let right = same(self)?;
            return Ok(build(left, right));
        }
        Ok(left)
    }

    fn iff(&mut self) -> PResult<Formula> {
        self.right_assoc(TokenKind::Iff, Self::implies, Self::iff, Formula::iff)
    }

    fn implies(&mut self) -> PResult<Formula> {
        self.right_assoc(TokenKind::Implies, Self::xor, Self::implies, Formula::implies)
    }

    fn xor(&mut self) -> PResult<Formula> {
        self.right_assoc(TokenKind::Xor, Self::or, Self::xor, Formula::xor)
    }

    fn or(&mut self) -> PResult<Formula> {
        self.right_assoc(TokenKind::Or, Self::and, Self::or, Formula::or)
    }

    fn and(&mut self) -> PResult<Formula> {
        self.right_assoc(TokenKind::And, Self::unary, Self::and, Formula::and)
    }

    fn unary(&mut self) -> PResult<Formula> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.at_eof("a formula"));
        };
        match &tok.kind {
            TokenKind::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            TokenKind::Forall => self.quantified(QuantifierKind::Forall),
            TokenKind::Exists => self.quantified(QuantifierKind::Exists),
            TokenKind::Ident(w) if is_quantifier_word(w) && self.peek_at(1).is_some_and(is_ident) => {
                let kind = if w == "all" {
                    QuantifierKind::Forall
                } else {
                    QuantifierKind::Exists
                };
                self.quantified(kind)
            }
            TokenKind::LParen => {
                self.bump();
                self.depth += 1;
                let f = self.formula()?;
                self.expect_close("`)` or a connective")?;
                self.depth -= 1;
                Ok(f)
            }
            TokenKind::Ident(_) => self.atom().map(Formula::Atom),
            _ => Err(self.unexpected(&tok, "a formula", ParseErrorKind::UnexpectedToken)),
        }
    }

    fn expect_close(&mut self, expecting: &str) -> PResult<()> {
        match self.peek().cloned() {
            Some(Token {
                kind: TokenKind::RParen,
                ..
            }) => {
                self.bump();
                Ok(())
            }
            Some(tok) => Err(self.unexpected(&tok, expecting, ParseErrorKind::UnexpectedToken)),
            None => Err(self.at_eof(expecting)),
        }
    }

    fn quantified(&mut self, kind: QuantifierKind) -> PResult<Formula> {
        let qtok = self.bump().expect("caller peeked a quantifier");
        let mut vars: Vec<String> = Vec::new();
        let mut span = qtok.span;
        loop {
            match self.peek().cloned() {
                Some(Token {
                    kind: TokenKind::Ident(name),
                    span: s,
                }) => {
                    if vars.contains(&name) {
                        return Err(ParseError {
                            kind: ParseErrorKind::MisplacedQuantifier,
                            span: s,
                            message: format!("variable `{name}` repeated in one quantifier block"),
                        });
                    }
                    self.bump();
                    vars.push(name);
                    span = span.join(s);
                }
                other => {
                    return Err(ParseError {
                        kind: ParseErrorKind::MisplacedQuantifier,
                        span: other.map(|t| t.span).unwrap_or(qtok.span),
                        message: "quantifier without a variable".into(),
                    })
                }
            }
            if self.peek().is_some_and(|t| t.kind == TokenKind::Comma) {
                self.bump();
            } else {
                break;
            }
        }
        if self.peek().is_some_and(|t| t.kind == TokenKind::Special('.')) {
            self.bump();
        }
        if self.peek().is_none() {
            return Err(ParseError {
                kind: ParseErrorKind::MisplacedQuantifier,
                span,
                message: "quantifier without a body".into(),
            });
        }
        let n = self.bound.len();
        self.bound.extend(vars.iter().cloned());
        let body = self.formula();
        self.bound.truncate(n);
        Ok(Formula::Quantified(Quantified {
            kind,
            vars,
            body: Box::new(body?),
            span,
        }))
    }

    fn atom(&mut self) -> PResult<Atom> {
        let tok = self.bump().expect("caller peeked an identifier");
        let TokenKind::Ident(name) = tok.kind else {
            unreachable!("atom starts with an identifier")
        };
        let mut span = tok.span;
        let mut args = Vec::new();
        if self.peek().is_some_and(|t| t.kind == TokenKind::LParen) {
            self.bump();
            self.depth += 1;
            loop {
                args.push(self.term()?);
                match self.peek().cloned() {
                    Some(Token {
                        kind: TokenKind::Comma, ..
                    }) => {
                        self.bump();
                    }
                    Some(Token {
                        kind: TokenKind::RParen,
                        span: s,
                    }) => {
                        self.bump();
                        span = span.join(s);
                        break;
                    }
                    Some(t) => return Err(self.unexpected(&t, "`,` or `)`", ParseErrorKind::UnexpectedToken)),
                    None => return Err(self.at_eof("`,` or `)`")),
                }
            }
            self.depth -= 1;
        }
        Ok(Atom {
            predicate: name,
            args,
            span,
        })
    }

    fn term(&mut self) -> PResult<Term> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.at_eof("a term"));
        };
        let TokenKind::Ident(name) = tok.kind.clone() else {
            return Err(self.unexpected(&tok, "a term", ParseErrorKind::UnexpectedToken));
        };
        self.bump();
        if self.peek().is_some_and(|t| t.kind == TokenKind::LParen) {
            self.bump();
            self.depth += 1;
            let mut args = Vec::new();
            loop {
                args.push(self.term()?);
                match self.peek().cloned() {
                    Some(Token {
                        kind: TokenKind::Comma, ..
                    }) => {
                        self.bump();
                    }
                    Some(Token {
                        kind: TokenKind::RParen,
                        ..
                    }) => {
                        self.bump();
                        break;
                    }
                    Some(t) => return Err(self.unexpected(&t, "`,` or `)`", ParseErrorKind::UnexpectedToken)),
                    None => return Err(self.at_eof("`,` or `)`")),
                }
            }
            self.depth -= 1;
            return Ok(Term::Function(name, args));
        }
        if self.bound.contains(&name) || is_variable_name(&name) {
            Ok(Term::Variable(name))
        } else {
            Ok(Term::Constant(name))
        }
    }
}
