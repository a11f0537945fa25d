//! S-expression reader for terms, formulas, and point literals.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::formula::Formula;
use crate::normal::rename_bound_apart;
use crate::scalar::{Scalar, ScalarError};
use crate::series::SeriesRegistry;
use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown series `{name}` at line {line}, column {col}")]
    UnknownSeries { name: String, line: usize, col: usize },
    #[error("series `{name}` expects {expected} arguments, got {got} (line {line}, column {col})")]
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
        line: usize,
        col: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Word(String),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, col);
        let mut advance = |c: char| {
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        };
        match c {
            '(' | ')' => {
                chars.next();
                advance(c);
                out.push(Token {
                    tok: if c == '(' { Tok::Open } else { Tok::Close },
                    line: l0,
                    col: c0,
                });
            }
            ';' | '#' => {
                // comment to end of line
                while let Some(&d) = chars.peek() {
                    if d == '\n' {
                        break;
                    }
                    chars.next();
                    advance(d);
                }
            }
            c if c.is_whitespace() => {
                chars.next();
                advance(c);
            }
            _ => {
                let mut word = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_whitespace() || d == '(' || d == ')' {
                        break;
                    }
                    word.push(d);
                    chars.next();
                    advance(d);
                }
                out.push(Token {
                    tok: Tok::Word(word),
                    line: l0,
                    col: c0,
                });
            }
        }
    }
    out
}

/// Whether a bare token denotes a scalar constant rather than a variable.
pub fn is_scalar_token(word: &str) -> bool {
    let first = word.chars().next().unwrap_or(' ');
    first.is_ascii_digit()
        || first == '+'
        || first == '-'
        || word == "w"
        || word.starts_with("w^")
        || word.starts_with("w*")
        || word.starts_with("w+")
        || word.starts_with("w-")
}

/// Valid variable names: letter or `_` followed by letters, digits, `_`, `'`; `w` is reserved.
pub fn is_identifier(word: &str) -> bool {
    let mut cs = word.chars();
    match cs.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    word != "w" && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

const KEYWORDS: &[&str] = &["le", "lt", "eq", "and", "or", "not", "exists", "neg", "D", "ps"];

struct Reader<'a> {
    toks: Vec<Token>,
    pos: usize,
    registry: &'a SeriesRegistry,
    end: (usize, usize),
}

impl<'a> Reader<'a> {
    fn new(text: &str, registry: &'a SeriesRegistry) -> Self {
        let lines: Vec<&str> = text.split('\n').collect();
        let end = (lines.len(), lines.last().map_or(0, |l| l.chars().count()) + 1);
        Reader {
            toks: tokenize(text),
            pos: 0,
            registry,
            end,
        }
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map_or(self.end, |t| (t.line, t.col))
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError::Syntax {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn expect_open(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Open) => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err("expected `(`"),
        }
    }

    fn expect_close(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Close) => {
                self.pos += 1;
                Ok(())
            }
            Some(_) => self.err("expected `)`"),
            None => self.err("unexpected end of input, expected `)`"),
        }
    }

    fn word(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => self.err("expected a word"),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos < self.toks.len() {
            return self.err("trailing input");
        }
        Ok(())
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.expect_open()?;
        let head = self.word()?;
        let f = match head.as_str() {
            "le" | "lt" | "eq" => {
                let a = self.term()?;
                let b = self.term()?;
                match head.as_str() {
                    "le" => Formula::Le(a, b),
                    "lt" => Formula::Lt(a, b),
                    _ => Formula::Eq(a, b),
                }
            }
            "and" | "or" => {
                let mut parts = vec![self.formula()?];
                while matches!(self.peek(), Some(Tok::Open)) {
                    parts.push(self.formula()?);
                }
                if head == "and" {
                    Formula::And(parts)
                } else {
                    Formula::Or(parts)
                }
            }
            "not" => Formula::not(self.formula()?),
            "exists" => {
                self.expect_open()?;
                let mut vars = Vec::new();
                while let Some(Tok::Word(_)) = self.peek() {
                    let v = self.word()?;
                    if !is_identifier(&v) || KEYWORDS.contains(&v.as_str()) {
                        self.pos -= 1;
                        return self.err(format!("`{v}` is not a valid variable name"));
                    }
                    vars.push(v);
                }
                if vars.is_empty() {
                    return self.err("`exists` needs at least one variable");
                }
                self.expect_close()?;
                Formula::Exists(vars, Box::new(self.formula()?))
            }
            other => {
                self.pos -= 1;
                return self.err(format!("unknown formula head `{other}`"));
            }
        };
        self.expect_close()?;
        Ok(f)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                if is_scalar_token(&w) {
                    let s: Scalar = match w.parse() {
                        Ok(s) => s,
                        Err(ScalarError::Parse { reason, .. }) => {
                            return self.err(format!("bad scalar `{w}`: {reason}"))
                        }
                        Err(e) => return self.err(e.to_string()),
                    };
                    if !s.is_exact() {
                        return self.err("term constants must be exact");
                    }
                    self.pos += 1;
                    Ok(Term::Const(s))
                } else if is_identifier(&w) && !KEYWORDS.contains(&w.as_str()) {
                    self.pos += 1;
                    Ok(Term::Var(w))
                } else {
                    self.err(format!("`{w}` is neither a variable nor a scalar"))
                }
            }
            Some(Tok::Open) => {
                self.pos += 1;
                let head = self.word()?;
                let t = match head.as_str() {
                    "+" | "*" => {
                        let mut ts = vec![self.term()?];
                        while !matches!(self.peek(), Some(Tok::Close) | None) {
                            ts.push(self.term()?);
                        }
                        if head == "+" {
                            Term::Sum(ts)
                        } else {
                            Term::Prod(ts)
                        }
                    }
                    "neg" => Term::neg(self.term()?),
                    "D" => {
                        let a = self.term()?;
                        let b = self.term()?;
                        Term::d(a, b)
                    }
                    "ps" => {
                        let (line, col) = self.here();
                        let name = self.word()?;
                        let Some(series) = self.registry.get(&name) else {
                            return Err(ParseError::UnknownSeries { name, line, col });
                        };
                        let mut args = Vec::new();
                        while !matches!(self.peek(), Some(Tok::Close) | None) {
                            args.push(self.term()?);
                        }
                        if args.len() != series.arity() {
                            return Err(ParseError::ArityMismatch {
                                name,
                                expected: series.arity(),
                                got: args.len(),
                                line,
                                col,
                            });
                        }
                        Term::Series(series, args)
                    }
                    other => {
                        self.pos -= 1;
                        return self.err(format!("unknown term head `{other}`"));
                    }
                };
                self.expect_close()?;
                Ok(t)
            }
            Some(Tok::Close) => self.err("unexpected `)`"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses a formula; bound variables that collide with other names are renamed apart.
pub fn parse_formula(text: &str, registry: &SeriesRegistry) -> Result<Formula, ParseError> {
    let mut r = Reader::new(text, registry);
    if r.toks.is_empty() {
        return r.err("empty input");
    }
    let f = r.formula()?;
    r.finish()?;
    Ok(rename_bound_apart(&f, &BTreeSet::new()))
}

pub fn parse_term(text: &str, registry: &SeriesRegistry) -> Result<Term, ParseError> {
    let mut r = Reader::new(text, registry);
    if r.toks.is_empty() {
        return r.err("empty input");
    }
    let t = r.term()?;
    r.finish()?;
    Ok(t)
}

/// Parses `(s1, s2, ...)` with standalone scalar literals such as `3/2 w^-1 + 2`.
pub fn parse_point(text: &str) -> Result<Vec<Scalar>, ScalarError> {
    let t = text.trim();
    let inner = t
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| ScalarError::Parse {
            text: text.to_string(),
            reason: "point literal must be parenthesized".into(),
        })?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    split_top_level(inner).iter().map(|s| s.trim().parse()).collect()
}

/// Splits on commas that are not nested inside parentheses (`O(w^3)` contains none, but be safe).
fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

pub fn format_point(coords: &[Scalar]) -> String {
    let parts: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(", "))
}
