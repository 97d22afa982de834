//! Words over named generators.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::EmbedError;

/// A generator name with a nonzero integer exponent. Serialized as
/// `["A", 3]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter(pub String, pub i64);

impl Letter {
    pub fn new(name: impl Into<String>, exp: i64) -> Self {
        Letter(name.into(), exp)
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn exp(&self) -> i64 {
        self.1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn gen(name: impl Into<String>) -> Self {
        Word::from_letters(vec![Letter::new(name, 1)])
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word { letters }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Number of unit letters, `sum |exp|`.
    pub fn length(&self) -> u64 {
        self.letters.iter().map(|l| l.1.unsigned_abs()).sum()
    }

    /// Freely reduced form: adjacent letters on the same generator merge and
    /// zero exponents disappear.
    pub fn reduced(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for l in &self.letters {
            if l.1 == 0 {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.0 == l.0 => {
                    last.1 += l.1;
                    if last.1 == 0 {
                        out.pop();
                    }
                }
                _ => out.push(l.clone()),
            }
        }
        Word { letters: out }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self
                .letters
                .iter()
                .rev()
                .map(|l| Letter(l.0.clone(), -l.1))
                .collect(),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        Word { letters }
    }

    /// `w^n`, with `w^-n = (w^-1)^n`.
    pub fn pow(&self, n: i64) -> Word {
        if let [l] = self.letters.as_slice() {
            return Word::from_letters(vec![Letter(l.0.clone(), l.1 * n)]).reduced();
        }
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut letters = Vec::with_capacity(base.letters.len() * n.unsigned_abs() as usize);
        for _ in 0..n.unsigned_abs() {
            letters.extend(base.letters.iter().cloned());
        }
        Word { letters }
    }

    /// `[a, b] = a b a^-1 b^-1`.
    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.concat(b).concat(&a.inverse()).concat(&b.inverse())
    }

    /// Replaces generators by words.
    pub fn substitute(&self, f: impl Fn(&str) -> Option<Word>) -> Word {
        let mut letters = Vec::new();
        for l in &self.letters {
            match f(&l.0) {
                Some(w) => letters.extend(w.pow(l.1).letters),
                None => letters.push(l.clone()),
            }
        }
        Word { letters }
    }

    /// Unit letters `(name, +-1)` of the cyclically reduced form.
    fn cyclic_units(&self) -> Vec<(String, i64)> {
        let mut units: Vec<(String, i64)> = Vec::new();
        for l in &self.reduced().letters {
            let step = l.1.signum();
            for _ in 0..l.1.unsigned_abs() {
                units.push((l.0.clone(), step));
            }
        }
        while units.len() >= 2 {
            let (first, last) = (&units[0], &units[units.len() - 1]);
            if first.0 == last.0 && first.1 == -last.1 {
                units.pop();
                units.remove(0);
            } else {
                break;
            }
        }
        units
    }

    /// Whether `other` is a cyclic permutation of this word or of its
    /// inverse, after cyclic reduction.
    pub fn is_cyclic_conjugate_of(&self, other: &Word) -> bool {
        let a = self.cyclic_units();
        let candidates = [other.cyclic_units(), other.inverse().cyclic_units()];
        candidates.iter().any(|b| {
            a.len() == b.len()
                && (a.is_empty() || (0..b.len()).any(|k| a.iter().eq(b[k..].iter().chain(&b[..k]))))
        })
    }

    /// Parses whitespace-separated letters such as `A^3 B^-1 A'`, with
    /// commutator sugar `[u,v]`, parenthesized groups, and exponents on
    /// either.
    pub fn parse(text: &str) -> Result<Word, EmbedError> {
        let mut p = Parser {
            chars: text.chars().collect(),
            pos: 0,
        };
        let w = p.word()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.error("unexpected character"));
        }
        Ok(w)
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn error(&self, msg: &str) -> EmbedError {
        let text: String = self.chars.iter().collect();
        EmbedError::Parse(format!("{msg} at position {} in {text:?}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<(), EmbedError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected {c:?}")))
        }
    }

    fn word(&mut self) -> Result<Word, EmbedError> {
        let mut w = Word::empty();
        while let Some(c) = self.peek() {
            if c == ',' || c == ']' || c == ')' {
                break;
            }
            let item = self.atom()?;
            let item = if self.peek() == Some('^') {
                self.pos += 1;
                let n = self.integer()?;
                item.pow(n)
            } else {
                item
            };
            w = w.concat(&item);
        }
        Ok(w)
    }

    fn atom(&mut self) -> Result<Word, EmbedError> {
        match self.peek() {
            Some('[') => {
                self.pos += 1;
                let a = self.word()?;
                self.expect(',')?;
                let b = self.word()?;
                self.expect(']')?;
                Ok(Word::commutator(&a, &b))
            }
            Some('(') => {
                self.pos += 1;
                let a = self.word()?;
                self.expect(')')?;
                Ok(a)
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
                {
                    self.pos += 1;
                }
                while self.pos < self.chars.len() && self.chars[self.pos] == '\'' {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                Ok(Word::gen(name))
            }
            _ => Err(self.error("expected generator name, '[' or '('")),
        }
    }

    fn integer(&mut self) -> Result<i64, EmbedError> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.chars.get(self.pos), Some('-') | Some('+')) {
            self.pos += 1;
        }
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse()
            .map_err(|_| self.error("expected integer exponent"))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            if l.1 == 1 {
                write!(f, "{}", l.0)?;
            } else {
                write!(f, "{}^{}", l.0, l.1)?;
            }
        }
        Ok(())
    }
}

/// All freely reduced words of exactly `len` unit letters over the given
/// generators and their inverses.
pub fn reduced_words(gens: &[&str], len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut stack: Vec<(String, i64)> = Vec::new();
    fn go(gens: &[&str], len: usize, stack: &mut Vec<(String, i64)>, out: &mut Vec<Word>) {
        if stack.len() == len {
            let w = Word::from_letters(
                stack
                    .iter()
                    .map(|(n, e)| Letter::new(n.clone(), *e))
                    .collect(),
            );
            out.push(w.reduced());
            return;
        }
        for g in gens {
            for e in [1, -1] {
                if let Some((pn, pe)) = stack.last() {
                    if pn == g && *pe == -e {
                        continue;
                    }
                }
                stack.push((g.to_string(), e));
                go(gens, len, stack, out);
                stack.pop();
            }
        }
    }
    go(gens, len, &mut stack, &mut out);
    out
}
