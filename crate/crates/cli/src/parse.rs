//! The expression language.
//!
//! ```text
//! expr    := factor (("*" | WS) factor)*
//! factor  := divisor | psi
//! divisor := "D" "{" labels "}" ("|" "{" labels "}")? ("^" NAT)?
//! psi     := "psi" NAT ("^" NAT)?
//! labels  := NAT ("," NAT)*
//! ```
//!
//! `D{2,6,8}` on `n = 9` is the divisor `D_{268|134579}`; an explicit
//! complement block must be exactly the complement in `1..=n`.

use std::fmt;

use m0n::{BoundaryProduct, Label, LabelSet, MarkedSet, Split};
use thiserror::Error;

/// Errors carry the byte offset in the input where they were detected.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("label {label} at position {position} is outside 1..={n}")]
    LabelOutOfRange { position: usize, label: u32, n: u32 },
    #[error("unstable divisor at position {position}: {{{side}}} must leave at least two labels on each side (n = {n})")]
    UnstableSplit {
        position: usize,
        side: String,
        n: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorKind {
    Divisor(Split),
    Psi(Label),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Factor {
    pub kind: FactorKind,
    pub exponent: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expression {
    pub ground: MarkedSet,
    pub factors: Vec<Factor>,
}

impl Expression {
    pub fn n(&self) -> u32 {
        self.ground.n()
    }

    pub fn to_product(&self) -> m0n::Result<BoundaryProduct> {
        let mut p = BoundaryProduct::new(self.ground);
        for f in &self.factors {
            p = match f.kind {
                FactorKind::Divisor(s) => p.divisor(s, f.exponent)?,
                FactorKind::Psi(l) => p.psi(l, f.exponent)?,
            };
        }
        Ok(p)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match factor.kind {
                FactorKind::Divisor(s) => write!(f, "D{{{}}}", s.block())?,
                FactorKind::Psi(l) => write!(f, "psi{l}")?,
            }
            if factor.exponent != 1 {
                write!(f, "^{}", factor.exponent)?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
    ground: MarkedSet,
}

impl<'a> Parser<'a> {
    fn syntax<T>(&self, position: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            position,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn eat(&mut self, byte: u8) -> bool {
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, byte: u8) -> Result<(), ParseError> {
        if self.eat(byte) {
            Ok(())
        } else {
            self.syntax(self.pos, format!("expected '{}'", byte as char))
        }
    }

    fn skip_ws(&mut self) -> bool {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
        self.pos > start
    }

    fn nat(&mut self) -> Result<u32, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.syntax(start, "expected a natural number");
        }
        std::str::from_utf8(&self.text[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .map_or_else(|| self.syntax(start, "number too large"), Ok)
    }

    fn label(&mut self) -> Result<Label, ParseError> {
        let position = self.pos;
        let label = self.nat()?;
        if !self.ground.contains(label) {
            return Err(ParseError::LabelOutOfRange {
                position,
                label,
                n: self.ground.n(),
            });
        }
        Ok(label)
    }

    fn labels(&mut self) -> Result<LabelSet, ParseError> {
        self.expect(b'{')?;
        let mut set = LabelSet::EMPTY;
        loop {
            let position = self.pos;
            let l = self.label()?;
            if set.contains(l) {
                return self.syntax(position, format!("label {l} repeated"));
            }
            set.insert(l);
            if !self.eat(b',') {
                break;
            }
        }
        self.expect(b'}')?;
        Ok(set)
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        if !self.eat(b'^') {
            return Ok(1);
        }
        let position = self.pos;
        match self.nat()? {
            0 => self.syntax(position, "exponent must be positive"),
            e => Ok(e),
        }
    }

    fn factor(&mut self) -> Result<Factor, ParseError> {
        let start = self.pos;
        if self.text[self.pos..].starts_with(b"psi") {
            self.pos += 3;
            let label = self.label()?;
            let exponent = self.exponent()?;
            return Ok(Factor {
                kind: FactorKind::Psi(label),
                exponent,
            });
        }
        if !self.eat(b'D') {
            return self.syntax(start, "expected a factor 'D{...}' or 'psiN'");
        }
        let side = self.labels()?;
        if self.eat(b'|') {
            let other_at = self.pos;
            let other = self.labels()?;
            if !side.intersection(other).is_empty() || side.union(other) != self.ground.labels() {
                return self.syntax(
                    other_at,
                    format!(
                        "{{{other}}} is not the complement of {{{side}}} in 1..={}",
                        self.ground.n()
                    ),
                );
            }
        }
        let split = Split::new(self.ground, side).map_err(|_| ParseError::UnstableSplit {
            position: start,
            side: side.to_string(),
            n: self.ground.n(),
        })?;
        let exponent = self.exponent()?;
        Ok(Factor {
            kind: FactorKind::Divisor(split),
            exponent,
        })
    }
}

/// Parses `text` as a product on the marked set `1..=n`.
pub fn parse(text: &str, ground: MarkedSet) -> Result<Expression, ParseError> {
    let mut p = Parser {
        text: text.as_bytes(),
        pos: 0,
        ground,
    };
    let mut factors = Vec::new();
    p.skip_ws();
    loop {
        factors.push(p.factor()?);
        let spaced = p.skip_ws();
        if p.eat(b'*') {
            p.skip_ws();
            continue;
        }
        if p.peek().is_none() {
            break;
        }
        if !spaced {
            return p.syntax(p.pos, "expected '*' or whitespace between factors");
        }
    }
    Ok(Expression { ground, factors })
}
