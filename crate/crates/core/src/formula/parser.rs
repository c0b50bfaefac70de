//! Text syntax for formulas.
//!
//! ```text
//! formula := "true" | "false" | prop | "!" formula | "(" formula ")"
//!          | formula "&" formula | formula "|" formula | formula "=>" formula
//!          | "EX" formula | "AX" formula | "F" formula | "G" formula
//!          | formula "U" formula | formula "W" formula
//! prop    := ident "(" [pat ("," pat)*] ")" [retpred]
//! retpred := "==" pat | "contains" pat
//! pat     := integer | string | "true" | "false" | "{" [pat ("," pat)*] "}" | ident | "_"
//! ```
//!
//! Loosest to tightest: `=>` (right) < `|` < `&` < `U`, `W` (right) < unary.

use std::fmt;

use thiserror::Error;

use super::{Formula, Pattern, Proposition, RetPredicate};
use crate::event::Value;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub found: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at offset {}: found {}, expected one of: {}",
            self.position,
            self.found,
            self.expected.join(", ")
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Bang,
    Amp,
    Pipe,
    Arrow,
    EqEq,
    Underscore,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(i) => format!("integer {i}"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`=>`".into(),
            Tok::EqEq => "`==`".into(),
            Tok::Underscore => "`_`".into(),
            Tok::Eof => "end of input".into(),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self, Tok::Ident(s) if s == kw)
    }
}

const KEYWORDS: &[&str] = &["true", "false", "EX", "AX", "F", "G", "U", "W", "contains"];

fn lex(input: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = input.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    let err = |pos: usize, found: String, expected: &[&str]| ParseError {
        position: pos,
        found,
        expected: expected.iter().map(|s| s.to_string()).collect(),
    };
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'{' => Tok::LBrace,
            b'}' => Tok::RBrace,
            b',' => Tok::Comma,
            b'!' => Tok::Bang,
            b'&' => Tok::Amp,
            b'|' => Tok::Pipe,
            b'=' => match bytes.get(i + 1) {
                Some(b'>') => {
                    i += 1;
                    Tok::Arrow
                }
                Some(b'=') => {
                    i += 1;
                    Tok::EqEq
                }
                _ => return Err(err(i, "`=`".into(), &["`=>`", "`==`"])),
            },
            b'"' => {
                let mut s = String::new();
                let mut chars = input[i + 1..].char_indices();
                loop {
                    match chars.next() {
                        None => return Err(err(start, "unterminated string".into(), &["`\"`"])),
                        Some((off, '"')) => {
                            i = i + 1 + off;
                            break;
                        }
                        Some((_, '\\')) => match chars.next() {
                            Some((_, 'n')) => s.push('\n'),
                            Some((_, 't')) => s.push('\t'),
                            Some((_, c)) => s.push(c),
                            None => {
                                return Err(err(start, "unterminated string".into(), &["`\"`"]))
                            }
                        },
                        Some((_, c)) => s.push(c),
                    }
                }
                Tok::Str(s)
            }
            b'-' | b'0'..=b'9' => {
                let mut j = i + 1;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let text = &input[i..j];
                let n = text
                    .parse::<i64>()
                    .map_err(|_| err(i, format!("`{text}`"), &["integer"]))?;
                i = j - 1;
                Tok::Int(n)
            }
            c if c == b'_' || c.is_ascii_alphabetic() => {
                let mut j = i + 1;
                while j < bytes.len() && (bytes[j] == b'_' || bytes[j].is_ascii_alphanumeric()) {
                    j += 1;
                }
                let word = &input[i..j];
                i = j - 1;
                if word == "_" {
                    Tok::Underscore
                } else {
                    Tok::Ident(word.to_string())
                }
            }
            _ => {
                let ch = input[i..].chars().next().unwrap_or('?');
                return Err(err(i, format!("`{ch}`"), &["formula"]));
            }
        };
        toks.push((start, tok));
        i += 1;
    }
    toks.push((input.len(), Tok::Eof));
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

/// Parses formula text.
pub fn parse(input: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(input)?,
        pos: 0,
    };
    let f = p.implies()?;
    p.expect(
        Tok::Eof,
        &["end of input", "`=>`", "`|`", "`&`", "`U`", "`W`"],
    )?;
    Ok(f)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        let i = (self.pos + ahead).min(self.toks.len() - 1);
        &self.toks[i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let (position, tok) = &self.toks[self.pos];
        ParseError {
            position: *position,
            found: tok.describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &[&str]) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.until()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            lhs = Formula::and(lhs, self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if self.peek().is_keyword("U") {
            self.bump();
            return Ok(Formula::until(lhs, self.until()?));
        }
        if self.peek().is_keyword("W") {
            self.bump();
            return Ok(Formula::weak_until(lhs, self.until()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        const START: &[&str] = &[
            "`true`",
            "`false`",
            "proposition",
            "`!`",
            "`(`",
            "`EX`",
            "`AX`",
            "`F`",
            "`G`",
        ];
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.implies()?;
                self.expect(Tok::RParen, &["`)`", "`=>`", "`|`", "`&`", "`U`", "`W`"])?;
                Ok(f)
            }
            Tok::Ident(word) => match word.as_str() {
                "true" => {
                    self.bump();
                    Ok(Formula::True)
                }
                "false" => {
                    self.bump();
                    Ok(Formula::False)
                }
                "EX" | "AX" | "F" | "G" => {
                    self.bump();
                    let inner = self.unary()?;
                    Ok(match word.as_str() {
                        "EX" => Formula::ex(inner),
                        "AX" => Formula::ax(inner),
                        "F" => Formula::eventually(inner),
                        _ => Formula::globally(inner),
                    })
                }
                w if KEYWORDS.contains(&w) => Err(self.error(START)),
                _ if *self.peek_at(1) == Tok::LParen => Ok(Formula::Prop(self.proposition()?)),
                _ => {
                    self.bump();
                    Err(self.error(&["`(`"]))
                }
            },
            _ => Err(self.error(START)),
        }
    }

    fn proposition(&mut self) -> Result<Proposition, ParseError> {
        let Tok::Ident(name) = self.bump() else {
            unreachable!("caller checked for an identifier");
        };
        self.expect(Tok::LParen, &["`(`"])?;
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                args.push(self.pattern()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, &["`,`", "`)`"])?;
        let ret = if *self.peek() == Tok::EqEq {
            self.bump();
            Some(RetPredicate::Equals(self.pattern()?))
        } else if self.peek().is_keyword("contains") {
            self.bump();
            Some(RetPredicate::Contains(self.pattern()?))
        } else {
            None
        };
        Ok(Proposition {
            op_name: name,
            args,
            ret,
        })
    }

    fn pattern(&mut self) -> Result<Pattern, ParseError> {
        const PAT: &[&str] = &[
            "integer", "string", "`true`", "`false`", "`{`", "variable", "`_`",
        ];
        match self.peek().clone() {
            Tok::Underscore => {
                self.bump();
                Ok(Pattern::Wildcard)
            }
            Tok::Ident(w) if w == "true" || w == "false" => {
                self.bump();
                Ok(Pattern::Literal(Value::Bool(w == "true")))
            }
            Tok::Ident(w) if KEYWORDS.contains(&w.as_str()) => Err(self.error(PAT)),
            Tok::Ident(w) => {
                self.bump();
                Ok(Pattern::Var(w))
            }
            Tok::Int(_) | Tok::Str(_) | Tok::LBrace => Ok(Pattern::Literal(self.value()?)),
            _ => Err(self.error(PAT)),
        }
    }

    fn value(&mut self) -> Result<Value, ParseError> {
        match self.bump() {
            Tok::Int(i) => Ok(Value::Int(i)),
            Tok::Str(s) => Ok(Value::Str(s)),
            Tok::Ident(w) if w == "true" => Ok(Value::Bool(true)),
            Tok::Ident(w) if w == "false" => Ok(Value::Bool(false)),
            Tok::LBrace => {
                let mut items = Vec::new();
                if *self.peek() != Tok::RBrace {
                    loop {
                        items.push(self.value()?);
                        if *self.peek() == Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::RBrace, &["`,`", "`}`"])?;
                Ok(Value::set(items))
            }
            _ => {
                self.pos -= 1;
                Err(self.error(&["integer", "string", "`true`", "`false`", "`{`"]))
            }
        }
    }
}
