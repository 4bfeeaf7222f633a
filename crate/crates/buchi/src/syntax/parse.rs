//! Recursive-descent parser for the formula grammar.
//!
//! ```text
//! formula := ("E"|"A"|"EINF") ident "." formula
//!          | formula BINOP formula            (<-> , -> , | , & low→high)
//!          | "!" formula | "(" formula ")" | atom
//! atom    := term ("="|"!="|"<"|"<="|">"|">=") term | term "%" nat "=" nat
//! term    := ident | nat | term "+" term | nat "*" term | "V(" term ")"
//! ```

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use super::{CmpOp, Formula, Term};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

const KEYWORDS: [&str; 4] = ["E", "A", "EINF", "V"];

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(BigUint),
    LParen,
    RParen,
    Dot,
    Plus,
    Star,
    Percent,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Iff,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '(' => toks.push((start, Tok::LParen)),
            ')' => toks.push((start, Tok::RParen)),
            '.' => toks.push((start, Tok::Dot)),
            '+' => toks.push((start, Tok::Plus)),
            '*' => toks.push((start, Tok::Star)),
            '%' => toks.push((start, Tok::Percent)),
            '&' => toks.push((start, Tok::Amp)),
            '|' => toks.push((start, Tok::Pipe)),
            '=' => toks.push((start, Tok::Eq)),
            '!' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 1;
                    toks.push((start, Tok::Ne));
                } else {
                    toks.push((start, Tok::Bang));
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'-') {
                    if bytes.get(i + 2) == Some(&b'>') {
                        i += 2;
                        toks.push((start, Tok::Iff));
                    } else {
                        return Err(ParseError { pos: start, msg: "expected `<->`".into() });
                    }
                } else if bytes.get(i + 1) == Some(&b'=') {
                    i += 1;
                    toks.push((start, Tok::Le));
                } else {
                    toks.push((start, Tok::Lt));
                }
            }
            '>' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 1;
                    toks.push((start, Tok::Ge));
                } else {
                    toks.push((start, Tok::Gt));
                }
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    i += 1;
                    toks.push((start, Tok::Arrow));
                } else {
                    return Err(ParseError { pos: start, msg: "expected `->`".into() });
                }
            }
            '0'..='9' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let n = text[i..j].parse::<BigUint>().expect("digits");
                toks.push((start, Tok::Nat(n)));
                i = j;
                continue;
            }
            'a'..='z' | 'A'..='Z' => {
                let mut j = i;
                while j < bytes.len()
                    && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_')
                {
                    j += 1;
                }
                toks.push((start, Tok::Ident(text[i..j].to_string())));
                i = j;
                continue;
            }
            '_' => {
                return Err(ParseError {
                    pos: start,
                    msg: "identifiers may not start with `_` (reserved for fresh variables)"
                        .into(),
                });
            }
            other => {
                return Err(ParseError { pos: start, msg: format!("unexpected character `{other}`") });
            }
        }
        i += 1;
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn err(&self, msg: String) -> ParseError {
        ParseError { pos: self.here(), msg }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.iff()
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.implication()?;
        if self.peek() == Some(&Tok::Iff) {
            self.pos += 1;
            let rhs = self.iff()?;
            Ok(Formula::iff(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.implication()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.pos += 1;
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(name)) if name == "E" || name == "A" || name == "EINF" => {
                let quant = name.clone();
                self.pos += 1;
                let var = self.variable()?;
                self.expect(Tok::Dot, "`.` after quantified variable")?;
                let body = self.formula()?;
                Ok(match quant.as_str() {
                    "E" => Formula::exists(var, body),
                    "A" => Formula::forall(var, body),
                    _ => Formula::exists_inf(var, body),
                })
            }
            _ => self.atom(),
        }
    }

    fn variable(&mut self) -> Result<String, ParseError> {
        match self.next() {
            Some(Tok::Ident(name)) => {
                if KEYWORDS.contains(&name.as_str()) {
                    self.pos -= 1;
                    Err(self.err(format!("`{name}` is reserved and cannot be a variable")))
                } else {
                    Ok(name)
                }
            }
            other => {
                if other.is_some() {
                    self.pos -= 1;
                }
                Err(self.err("expected a variable name".into()))
            }
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.term()?;
        match self.next() {
            Some(Tok::Eq) => Ok(Formula::Cmp(lhs, CmpOp::Eq, self.term()?)),
            Some(Tok::Ne) => Ok(Formula::Cmp(lhs, CmpOp::Ne, self.term()?)),
            Some(Tok::Lt) => Ok(Formula::Cmp(lhs, CmpOp::Lt, self.term()?)),
            Some(Tok::Le) => Ok(Formula::Cmp(lhs, CmpOp::Le, self.term()?)),
            Some(Tok::Gt) => Ok(Formula::Cmp(lhs, CmpOp::Gt, self.term()?)),
            Some(Tok::Ge) => Ok(Formula::Cmp(lhs, CmpOp::Ge, self.term()?)),
            Some(Tok::Percent) => {
                let modulus = self.natural()?;
                if modulus < BigUint::from(2u32) {
                    self.pos -= 1;
                    return Err(self.err("modulus must be at least 2".into()));
                }
                self.expect(Tok::Eq, "`=` after modulus")?;
                let residue = self.natural()?;
                Ok(Formula::ModEq(lhs, modulus, residue))
            }
            other => {
                if other.is_some() {
                    self.pos -= 1;
                }
                Err(self.err("expected a comparison operator".into()))
            }
        }
    }

    fn natural(&mut self) -> Result<BigUint, ParseError> {
        match self.next() {
            Some(Tok::Nat(n)) => Ok(n),
            other => {
                if other.is_some() {
                    self.pos -= 1;
                }
                Err(self.err("expected a number".into()))
            }
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.factor()?;
        while self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
            lhs = Term::sum(lhs, self.factor()?);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Term, ParseError> {
        match self.next() {
            Some(Tok::Nat(n)) => {
                if self.peek() == Some(&Tok::Star) {
                    self.pos += 1;
                    if n.is_zero() {
                        self.pos -= 2;
                        return Err(self.err("scale coefficient must be at least 1".into()));
                    }
                    let operand = self.factor()?;
                    if n.is_one() {
                        Ok(operand)
                    } else {
                        Ok(Term::Scale(n, Box::new(operand)))
                    }
                } else {
                    Ok(Term::Const(n))
                }
            }
            Some(Tok::Ident(name)) if name == "V" => {
                self.expect(Tok::LParen, "`(` after V")?;
                let inner = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Term::v(inner))
            }
            Some(Tok::Ident(name)) => {
                if KEYWORDS.contains(&name.as_str()) {
                    self.pos -= 1;
                    Err(self.err(format!("`{name}` is reserved and cannot be a variable")))
                } else {
                    Ok(Term::Var(name))
                }
            }
            other => {
                if other.is_some() {
                    self.pos -= 1;
                }
                Err(self.err("expected a term".into()))
            }
        }
    }
}

/// Parses a formula from text.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len() };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return Err(p.err("unexpected trailing input".into()));
    }
    Ok(f)
}
