//! Exact coefficient arithmetic.
//!
//! Coefficients of every series and vector field live in the polynomial ring
//! `Q[s0, s1, ...]`. Each symbol stands for a transcendental that is
//! algebraically independent of everything allocated before it, so freeness of
//! the polynomial ring is all the independence the embedding constructions
//! need. Zero testing is therefore decidable and exact.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Default cap on the number of terms of a single coefficient.
pub const DEFAULT_MAX_TERMS: usize = 200_000;

static MAX_TERMS: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_TERMS);

/// Sets the process-wide term-count guard.
pub fn set_max_terms(limit: usize) {
    MAX_TERMS.store(limit.max(1), AtomicOrdering::Relaxed);
}

pub fn max_terms() -> usize {
    MAX_TERMS.load(AtomicOrdering::Relaxed)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("zero divisor")]
    ZeroDivisor,
    #[error("unassigned symbol {0}")]
    UnassignedSymbol(String),
    #[error("blowup: coefficient has {terms} terms, limit is {limit}")]
    Blowup { terms: usize, limit: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Renders `p/q`, or just `p` when the denominator is one.
pub fn rational_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(text: &str) -> Result<Rational, FieldError> {
    let text = text.trim();
    let bad = || FieldError::Parse(format!("invalid rational {text:?}"));
    match text.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(FieldError::ZeroDivisor);
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(
            BigInt::from_str(text).map_err(|_| bad())?,
        )),
    }
}

/// A transcendental generator of the coefficient ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub id: u32,
    pub name: String,
}

impl Symbol {
    pub fn new(id: u32) -> Self {
        Symbol {
            id,
            name: symbol_name(id),
        }
    }

    pub fn elem(&self) -> FieldElem {
        FieldElem::symbol(self.id)
    }
}

pub fn symbol_name(id: u32) -> String {
    format!("s{id}")
}

/// Inverse of [`symbol_name`].
pub fn parse_symbol_name(name: &str) -> Option<u32> {
    let digits = name.strip_prefix('s')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if digits.len() > 1 && digits.starts_with('0') {
        return None;
    }
    digits.parse().ok()
}

/// Append-only supply of fresh symbols.
///
/// Allocation takes `&mut self`, so a registry has a single writer at a time.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolRegistry {
    next: u32,
    symbols: Vec<Symbol>,
}

impl SymbolRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh(&mut self) -> Symbol {
        let sym = Symbol::new(self.next);
        self.next += 1;
        self.symbols.push(sym.clone());
        sym
    }

    pub fn next_id(&self) -> u32 {
        self.next
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn contains(&self, id: u32) -> bool {
        id < self.next
    }
}

impl Serialize for SymbolRegistry {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.symbols.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymbolRegistry {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let symbols = Vec::<Symbol>::deserialize(deserializer)?;
        for (i, sym) in symbols.iter().enumerate() {
            if sym.id as usize != i || sym.name != symbol_name(sym.id) {
                return Err(de::Error::custom(format!(
                    "registry entry {i} is {:?}; expected consecutive ids starting at s0",
                    sym.name
                )));
            }
        }
        Ok(SymbolRegistry {
            next: symbols.len() as u32,
            symbols,
        })
    }
}

/// Exponent vector stored sparsely as `(symbol id, exponent)` pairs sorted by
/// id, with no zero exponents.
///
/// Ordered graded-lexicographically: total degree first, then the larger
/// exponent on the smallest symbol id wins.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(u32, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(id: u32) -> Self {
        Monomial(vec![(id, 1)])
    }

    /// Builds a monomial from arbitrary pairs, merging repeats and dropping
    /// zero exponents.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut v: Vec<(u32, u32)> = pairs.into_iter().filter(|&(_, e)| e > 0).collect();
        v.sort_unstable_by_key(|&(id, _)| id);
        let mut out: Vec<(u32, u32)> = Vec::with_capacity(v.len());
        for (id, e) in v {
            match out.last_mut() {
                Some(last) if last.0 == id => last.1 += e,
                _ => out.push((id, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn degree_in(&self, id: u32) -> u32 {
        self.0
            .iter()
            .find(|&&(i, _)| i == id)
            .map_or(0, |&(_, e)| e)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(id, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < id {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == id {
                let d = other.0[j].1;
                j += 1;
                match e.cmp(&d) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((id, e - d)),
                }
            } else {
                out.push((id, e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    fn lex_cmp(&self, other: &Monomial) -> Ordering {
        for (x, y) in self.0.iter().zip(other.0.iter()) {
            if x.0 != y.0 {
                // smaller id present on one side only: that side is larger
                return if x.0 < y.0 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                };
            }
            if x.1 != y.1 {
                return x.1.cmp(&y.1);
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.lex_cmp(other))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, &(id, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            write!(f, "{}", symbol_name(id))?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Element of `Q[s0, s1, ...]` in canonical form: terms sorted ascending by
/// graded-lex monomial order, no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FieldElem {
    terms: Vec<(Monomial, Rational)>,
}

impl FieldElem {
    pub fn zero() -> Self {
        FieldElem { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            FieldElem {
                terms: vec![(Monomial::one(), c)],
            }
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(integer(n))
    }

    pub fn symbol(id: u32) -> Self {
        FieldElem {
            terms: vec![(Monomial::var(id), Rational::one())],
        }
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            FieldElem {
                terms: vec![(m, c)],
            }
        }
    }

    /// Canonicalizes arbitrary `(monomial, coefficient)` pairs, summing
    /// repeated monomials.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (m, c) in terms {
            *acc.entry(m).or_insert_with(Rational::zero) += c;
        }
        Self::from_map(acc)
    }

    fn from_map(acc: HashMap<Monomial, Rational>) -> Self {
        let mut terms: Vec<(Monomial, Rational)> =
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        FieldElem { terms }
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    /// The value when this is a constant polynomial.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(m, _)| m.degree())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, id: u32) -> u32 {
        self.terms
            .iter()
            .map(|(m, _)| m.degree_in(id))
            .max()
            .unwrap_or(0)
    }

    pub fn symbols(&self) -> BTreeSet<u32> {
        self.terms
            .iter()
            .flat_map(|(m, _)| m.pairs().iter().map(|&(id, _)| id))
            .collect()
    }

    /// Leading term in graded-lex order.
    pub fn leading(&self) -> Option<&(Monomial, Rational)> {
        self.terms.last()
    }

    /// Fails with [`FieldError::Blowup`] when the term count exceeds the
    /// global guard.
    pub fn check_terms(&self) -> Result<(), FieldError> {
        let limit = max_terms();
        if self.terms.len() > limit {
            Err(FieldError::Blowup {
                terms: self.terms.len(),
                limit,
            })
        } else {
            Ok(())
        }
    }

    pub fn guarded(self) -> Result<Self, FieldError> {
        self.check_terms()?;
        Ok(self)
    }

    pub fn scale(&self, c: &Rational) -> FieldElem {
        if c.is_zero() {
            return FieldElem::zero();
        }
        FieldElem {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> FieldElem {
        self.scale(&integer(n))
    }

    /// Divides every coefficient by the integer `n`.
    pub fn div_int(&self, n: i64) -> Result<FieldElem, FieldError> {
        if n == 0 {
            return Err(FieldError::ZeroDivisor);
        }
        Ok(self.scale(&rational(1, n)))
    }

    pub fn div_rational(&self, c: &Rational) -> Result<FieldElem, FieldError> {
        if c.is_zero() {
            return Err(FieldError::ZeroDivisor);
        }
        Ok(self.scale(&c.recip()))
    }

    fn merge(&self, other: &FieldElem, negate_other: bool) -> FieldElem {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        let take_b = |c: &Rational| if negate_other { -c } else { c.clone() };
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b[j].0.clone(), take_b(&b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate_other {
                        &a[i].1 - &b[j].1
                    } else {
                        &a[i].1 + &b[j].1
                    };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| (m.clone(), take_b(c))));
        FieldElem { terms: out }
    }

    pub fn add_ref(&self, other: &FieldElem) -> FieldElem {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        self.merge(other, false)
    }

    pub fn sub_ref(&self, other: &FieldElem) -> FieldElem {
        if other.is_zero() {
            return self.clone();
        }
        self.merge(other, true)
    }

    pub fn mul_ref(&self, other: &FieldElem) -> FieldElem {
        if self.is_zero() || other.is_zero() {
            return FieldElem::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let mut acc: HashMap<Monomial, Rational> =
            HashMap::with_capacity(self.terms.len() * other.terms.len() / 2 + 1);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(x) => *x += c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        FieldElem::from_map(acc)
    }

    pub fn pow(&self, mut e: u32) -> FieldElem {
        let mut base = self.clone();
        let mut acc = FieldElem::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    /// Exact quotient `self / divisor` in the polynomial ring, or `None` when
    /// the divisor does not divide.
    pub fn div_exact(&self, divisor: &FieldElem) -> Result<Option<FieldElem>, FieldError> {
        let (lead_m, lead_c) = divisor.leading().ok_or(FieldError::ZeroDivisor)?.clone();
        let mut rem = self.clone();
        let mut quot: Vec<(Monomial, Rational)> = Vec::new();
        while let Some((m, c)) = rem.leading().cloned() {
            let Some(qm) = m.div(&lead_m) else {
                return Ok(None);
            };
            let qc = &c / &lead_c;
            let step = FieldElem::monomial(qm.clone(), qc.clone());
            rem = rem.sub_ref(&step.mul_ref(divisor));
            rem.check_terms()?;
            quot.push((qm, qc));
        }
        Ok(Some(FieldElem::from_terms(quot)))
    }

    /// Exact value at a point.
    pub fn evaluate(&self, point: &HashMap<u32, Rational>) -> Result<Rational, FieldError> {
        let mut powers: HashMap<(u32, u32), Rational> = HashMap::new();
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for &(id, e) in m.pairs() {
                let v = point
                    .get(&id)
                    .ok_or_else(|| FieldError::UnassignedSymbol(symbol_name(id)))?;
                let p = powers
                    .entry((id, e))
                    .or_insert_with(|| num_traits::pow::pow(v.clone(), e as usize));
                term *= &*p;
            }
            total += term;
        }
        Ok(total)
    }

    /// Substitutes the assigned symbols and leaves the rest symbolic.
    pub fn substitute(&self, point: &HashMap<u32, Rational>) -> FieldElem {
        let mut out: HashMap<Monomial, Rational> = HashMap::new();
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut rest = Vec::new();
            for &(id, e) in m.pairs() {
                match point.get(&id) {
                    Some(v) => coef *= num_traits::pow::pow(v.clone(), e as usize),
                    None => rest.push((id, e)),
                }
            }
            *out.entry(Monomial(rest)).or_insert_with(Rational::zero) += coef;
        }
        FieldElem::from_map(out)
    }
}

/// Draws a point with integer coordinates uniform in `[-bound, bound]`.
pub fn random_point<R: Rng + ?Sized>(
    rng: &mut R,
    ids: impl IntoIterator<Item = u32>,
    bound: i64,
) -> HashMap<u32, Rational> {
    ids.into_iter()
        .map(|id| (id, integer(rng.gen_range(-bound..=bound))))
        .collect()
}

/// Evaluates at a random point, redrawing whenever the value vanishes, up to
/// `attempts` draws. A nonzero value certifies that the polynomial is nonzero;
/// `None` means every draw hit a root (or the polynomial is zero).
pub fn sample_nonzero<R: Rng + ?Sized>(
    a: &FieldElem,
    rng: &mut R,
    bound: i64,
    attempts: usize,
) -> Option<(Rational, usize)> {
    if a.is_zero() {
        return None;
    }
    for k in 0..attempts {
        let point = random_point(rng, a.symbols(), bound);
        let v = a.evaluate(&point).expect("point covers every symbol");
        if !v.is_zero() {
            return Some((v, k + 1));
        }
    }
    None
}

impl Add for FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: FieldElem) -> FieldElem {
        self.add_ref(&rhs)
    }
}

impl<'a> Add<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: &FieldElem) -> FieldElem {
        self.add_ref(rhs)
    }
}

impl Sub for FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: FieldElem) -> FieldElem {
        self.sub_ref(&rhs)
    }
}

impl<'a> Sub<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: &FieldElem) -> FieldElem {
        self.sub_ref(rhs)
    }
}

impl Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: FieldElem) -> FieldElem {
        self.mul_ref(&rhs)
    }
}

impl<'a> Mul<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: &FieldElem) -> FieldElem {
        self.mul_ref(rhs)
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -self.clone()
    }
}

impl From<Rational> for FieldElem {
    fn from(c: Rational) -> Self {
        FieldElem::constant(c)
    }
}

impl From<i64> for FieldElem {
    fn from(n: i64) -> Self {
        FieldElem::from_int(n)
    }
}

impl fmt::Display for FieldElem {
    /// Highest-order term first, e.g. `2/3*s0^2*s1 - s1 + 5`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            if m.is_one() {
                write!(f, "{}", rational_to_string(&abs))?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", rational_to_string(&abs))?;
            }
        }
        Ok(())
    }
}

struct Exps<'a>(&'a Monomial);

impl Serialize for Exps<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.pairs().len()))?;
        for &(id, e) in self.0.pairs() {
            map.serialize_entry(&symbol_name(id), &e)?;
        }
        map.end()
    }
}

struct Term<'a>(&'a Monomial, &'a Rational);

impl Serialize for Term<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Term", 2)?;
        st.serialize_field("coef", &rational_to_string(self.1))?;
        st.serialize_field("exps", &Exps(self.0))?;
        st.end()
    }
}

impl Serialize for FieldElem {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.terms.iter().map(|(m, c)| Term(m, c)))
    }
}

#[derive(Deserialize)]
struct RawTerm {
    coef: String,
    #[serde(default)]
    exps: indexmap::IndexMap<String, u32>,
}

impl<'de> Deserialize<'de> for FieldElem {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = Vec::<RawTerm>::deserialize(deserializer)?;
        let mut terms = Vec::with_capacity(raw.len());
        for t in raw {
            let c = parse_rational(&t.coef).map_err(de::Error::custom)?;
            let mut pairs = Vec::with_capacity(t.exps.len());
            for (name, e) in t.exps {
                let id = parse_symbol_name(&name)
                    .ok_or_else(|| de::Error::custom(format!("bad symbol name {name:?}")))?;
                pairs.push((id, e));
            }
            terms.push((Monomial::from_pairs(pairs), c));
        }
        Ok(FieldElem::from_terms(terms))
    }
}
