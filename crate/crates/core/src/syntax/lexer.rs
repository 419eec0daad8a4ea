//! Tokenizer for Prover9-style formulas in both Unicode and ASCII spellings.
//!
//! The lexer never fails: characters outside the formula alphabet become
//! [`TokenKind::Special`] or [`TokenKind::UnknownOp`] tokens so that the
//! parser can report the leftmost blocking problem.

use super::ast::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Xor,
    Forall,
    Exists,
    /// Operator-like symbol outside the connective alphabet (`>`, `=`, `+`, ...).
    UnknownOp(String),
    /// Any other character the grammar does not admit (`$`, `.`, `:`, ...).
    Special(char),
}

impl TokenKind {
    pub fn is_connective(&self) -> bool {
        matches!(
            self,
            TokenKind::And | TokenKind::Or | TokenKind::Implies | TokenKind::Iff | TokenKind::Xor
        )
    }

    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Not => "negation".into(),
            TokenKind::And => "conjunction".into(),
            TokenKind::Or => "disjunction".into(),
            TokenKind::Implies => "implication".into(),
            TokenKind::Iff => "biconditional".into(),
            TokenKind::Xor => "exclusive or".into(),
            TokenKind::Forall => "universal quantifier".into(),
            TokenKind::Exists => "existential quantifier".into(),
            TokenKind::UnknownOp(s) => format!("unknown operator `{s}`"),
            TokenKind::Special(c) => format!("special character `{c}`"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn is_math_operator(c: char) -> bool {
    matches!(
        c,
        '<' | '>'
            | '='
            | '+'
            | '*'
            | '/'
            | '^'
            | '%'
            | '≤'
            | '≥'
            | '≠'
            | '≈'
            | '×'
            | '÷'
            | '±'
            | '∈'
            | '∉'
            | '⊂'
            | '⊆'
            | '⊃'
            | '⊇'
            | '∪'
            | '∩'
            | '∑'
            | '∏'
            | '√'
            | '∘'
            | '⊢'
            | '⊨'
    )
}

/// Splits `src` into tokens. Whitespace is skipped.
pub fn tokenize(src: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut it = src.char_indices().peekable();
    while let Some(&(start, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        if is_ident_char(c) {
            let mut end = start;
            while let Some(&(i, d)) = it.peek() {
                if is_ident_char(d) {
                    end = i + d.len_utf8();
                    it.next();
                } else {
                    break;
                }
            }
            out.push(Token {
                kind: TokenKind::Ident(src[start..end].to_string()),
                span: Span::new(start, end),
            });
            continue;
        }
        let rest = &src[start..];
        let multi = [
            ("<->", TokenKind::Iff),
            ("<=>", TokenKind::Iff),
            ("->", TokenKind::Implies),
            ("=>", TokenKind::Implies),
        ];
        if let Some((lit, kind)) = multi.iter().find(|(lit, _)| rest.starts_with(lit)) {
            for _ in 0..lit.chars().count() {
                it.next();
            }
            out.push(Token {
                kind: kind.clone(),
                span: Span::new(start, start + lit.len()),
            });
            continue;
        }
        it.next();
        let span = Span::new(start, start + c.len_utf8());
        let kind = match c {
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            ',' => TokenKind::Comma,
            '¬' | '-' | '~' => TokenKind::Not,
            '∧' | '&' => TokenKind::And,
            '∨' | '|' => TokenKind::Or,
            '→' | '⇒' | '⟶' => TokenKind::Implies,
            '↔' | '⇔' | '⟷' => TokenKind::Iff,
            '⊕' | '⊻' => TokenKind::Xor,
            '∀' => TokenKind::Forall,
            '∃' => TokenKind::Exists,
            c if is_math_operator(c) => TokenKind::UnknownOp(c.to_string()),
            c => TokenKind::Special(c),
        };
        out.push(Token { kind, span });
    }
    out
}

/// Decodes `\uXXXX` escape sequences that some generators emit in place of
/// the logical symbols. Text without escapes is returned unchanged.
pub fn decode_unicode_escapes(src: &str) -> std::borrow::Cow<'_, str> {
    if !src.contains("\\u") {
        return std::borrow::Cow::Borrowed(src);
    }
    let mut out = String::with_capacity(src.len());
    let mut rest = src;
    while let Some(pos) = rest.find("\\u") {
        out.push_str(&rest[..pos]);
        let hex = rest.get(pos + 2..pos + 6);
        match hex
            .and_then(|h| u32::from_str_radix(h, 16).ok())
            .and_then(char::from_u32)
        {
            Some(ch) => {
                out.push(ch);
                rest = &rest[pos + 6..];
            }
            None => {
                out.push_str("\\u");
                rest = &rest[pos + 2..];
            }
        }
    }
    out.push_str(rest);
    std::borrow::Cow::Owned(out)
}
