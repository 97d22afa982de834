//! Text syntax for coefficients, vector fields and series.
//!
//! Coefficients are polynomials in symbols `s0, s1, ...` with rational
//! constants: `2/3*s0^2*s1 - s1 + 5`. Vector fields are linear combinations
//! of basis fields `e1, e2, ...`: `s0*e1 + s0^2*e2`, `2 e1 + 1/2 e3`.
//! Juxtaposition means multiplication.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::field::{parse_rational, parse_symbol_name, FieldElem, FieldError};
use crate::liealg::VectorField;
use crate::series::Series;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{msg} at position {pos} in {text:?}")]
pub struct ParseError {
    pub msg: String,
    pub pos: usize,
    pub text: String,
}

/// A scalar part plus coefficients of `e_j`.
#[derive(Debug, Clone, Default)]
struct Value {
    scalar: FieldElem,
    fields: BTreeMap<usize, FieldElem>,
}

impl Value {
    fn scalar(c: FieldElem) -> Self {
        Value {
            scalar: c,
            fields: BTreeMap::new(),
        }
    }

    fn is_scalar(&self) -> bool {
        self.fields.values().all(FieldElem::is_zero)
    }

    fn add(mut self, other: Value, sign: i64) -> Value {
        let other_scalar = other.scalar.scale_int(sign);
        self.scalar = self.scalar.add_ref(&other_scalar);
        for (j, c) in other.fields {
            let entry = self.fields.entry(j).or_default();
            *entry = entry.add_ref(&c.scale_int(sign));
        }
        self
    }

    fn mul(self, other: Value) -> Option<Value> {
        let (s, v) = match (self.is_scalar(), other.is_scalar()) {
            (true, true) => return Some(Value::scalar(self.scalar.mul_ref(&other.scalar))),
            (true, false) => (self.scalar, other),
            (false, true) => (other.scalar, self),
            (false, false) => return None,
        };
        if !v.scalar.is_zero() {
            return None;
        }
        Some(Value {
            scalar: FieldElem::zero(),
            fields: v
                .fields
                .into_iter()
                .map(|(j, c)| (j, s.mul_ref(&c)))
                .collect(),
        })
    }
}

struct Parser<'a> {
    text: &'a str,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            text,
            chars: text.chars().collect(),
            pos: 0,
        }
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            msg: msg.into(),
            pos: self.pos,
            text: self.text.to_string(),
        }
    }

    fn peek(&mut self) -> Option<char> {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
        self.chars.get(self.pos).copied()
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(self.error(format!("unexpected {c:?}"))),
        }
    }

    fn sum(&mut self) -> Result<Value, ParseError> {
        let mut sign = 1;
        match self.peek() {
            Some('-') => {
                sign = -1;
                self.pos += 1;
            }
            Some('+') => self.pos += 1,
            _ => {}
        }
        let mut acc = Value::default().add(self.product()?, sign);
        loop {
            let sign = match self.peek() {
                Some('+') => 1,
                Some('-') => -1,
                _ => return Ok(acc),
            };
            self.pos += 1;
            acc = acc.add(self.product()?, sign);
        }
    }

    fn product(&mut self) -> Result<Value, ParseError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some('*') => self.pos += 1,
                Some(c) if c.is_ascii_alphanumeric() || c == '(' => {}
                _ => return Ok(acc),
            }
            let start = self.pos;
            let rhs = self.power()?;
            acc = acc.mul(rhs).ok_or_else(|| ParseError {
                msg: "product is not linear in the basis fields".into(),
                pos: start,
                text: self.text.to_string(),
            })?;
        }
    }

    fn power(&mut self) -> Result<Value, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        self.peek();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        let e: u32 = digits
            .parse()
            .map_err(|_| self.error("expected a nonnegative integer exponent"))?;
        if !base.is_scalar() {
            return Err(self.error("basis fields cannot be raised to a power"));
        }
        Ok(Value::scalar(base.scalar.pow(e)))
    }

    fn atom(&mut self) -> Result<Value, ParseError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let v = self.sum()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_ascii_digit() || self.chars[self.pos] == '/')
                {
                    self.pos += 1;
                }
                let lit: String = self.chars[start..self.pos].iter().collect();
                let r = parse_rational(&lit).map_err(|e| ParseError {
                    msg: e.to_string(),
                    pos: start,
                    text: self.text.to_string(),
                })?;
                Ok(Value::scalar(FieldElem::constant(r)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                if let Some(id) = parse_symbol_name(&name) {
                    return Ok(Value::scalar(FieldElem::symbol(id)));
                }
                match name.strip_prefix('e').map(str::parse::<usize>) {
                    Some(Ok(j)) if j >= 1 => {
                        let mut fields = BTreeMap::new();
                        fields.insert(j, FieldElem::one());
                        Ok(Value {
                            scalar: FieldElem::zero(),
                            fields,
                        })
                    }
                    _ => {
                        self.pos = start;
                        Err(self.error(format!("unknown name {name:?}")))
                    }
                }
            }
            Some(c) => Err(self.error(format!("unexpected {c:?}"))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Parses a coefficient polynomial such as `2/3*s0^2 - s1 + 5`.
pub fn parse_elem(text: &str) -> Result<FieldElem, ParseError> {
    let mut p = Parser::new(text);
    let v = p.sum()?;
    p.finish()?;
    if !v.is_scalar() {
        return Err(ParseError {
            msg: "expected a coefficient, found basis fields".into(),
            pos: 0,
            text: text.to_string(),
        });
    }
    Ok(v.scalar)
}

/// Parses `sum c_j e_j` into a vector field with `n` coefficients.
pub fn parse_vector_field(text: &str, n: usize) -> Result<VectorField, ParseError> {
    let mut p = Parser::new(text);
    let v = p.sum()?;
    p.finish()?;
    let fail = |msg: String| ParseError {
        msg,
        pos: 0,
        text: text.to_string(),
    };
    if !v.scalar.is_zero() {
        return Err(fail(
            "constant term outside the span of the basis fields".into(),
        ));
    }
    let mut coeffs = vec![FieldElem::zero(); n];
    for (j, c) in v.fields {
        if c.is_zero() {
            continue;
        }
        if j > n {
            return Err(fail(format!("e{j} exceeds the truncation order {n}")));
        }
        coeffs[j - 1] = c;
    }
    VectorField::from_coeffs(coeffs).map_err(|e| fail(e.to_string()))
}

/// Parses a series either as JSON (`{"order":..,"coeffs":..}`) or as a
/// bracketed coefficient list `[c1, c2, ...]` of coefficient polynomials.
pub fn parse_series(text: &str) -> Result<Series, ParseError> {
    let trimmed = text.trim();
    let fail = |msg: String| ParseError {
        msg,
        pos: 0,
        text: text.to_string(),
    };
    if trimmed.starts_with('{') {
        return serde_json::from_str(trimmed).map_err(|e| fail(e.to_string()));
    }
    let inner = trimmed
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| fail("expected [c1, c2, ...] or series JSON".into()))?;
    let coeffs = inner
        .split(',')
        .map(parse_elem)
        .collect::<Result<Vec<_>, _>>()?;
    Series::from_coeffs(coeffs).map_err(|e| fail(e.to_string()))
}

impl From<ParseError> for FieldError {
    fn from(e: ParseError) -> Self {
        FieldError::Parse(e.to_string())
    }
}
