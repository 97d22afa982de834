//! The truncated composition group `G[[r]]_N`.
//!
//! A [`Series`] of order `N` stores `(c1, ..., cN)` and stands for
//! `r + c1 r^2 + ... + cN r^(N+1)`. The group law is composition with the
//! convention `(f * g)(r) = f(g(r))`, everywhere in this crate.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{integer, rational_to_string, FieldElem, FieldError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("cannot extend a series of order {order} to order {requested}")]
    CannotExtend { requested: usize, order: usize },
    #[error("series order must be at least 1")]
    ZeroOrder,
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Series {
    coeffs: Vec<FieldElem>,
}

/// Product of two truncated power series in `r`, keeping degrees `0..=deg`.
pub(crate) fn mul_trunc(
    a: &[FieldElem],
    b: &[FieldElem],
    deg: usize,
) -> Result<Vec<FieldElem>, FieldError> {
    let mut out = vec![FieldElem::zero(); deg + 1];
    for (i, x) in a.iter().enumerate().take(deg + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(deg + 1 - i) {
            if y.is_zero() {
                continue;
            }
            let prod = x.mul_ref(y);
            out[i + j] = out[i + j].add_ref(&prod);
            out[i + j].check_terms()?;
        }
    }
    Ok(out)
}

impl Series {
    /// The identity series `r` at order `n`.
    ///
    /// Panics when `n == 0`.
    pub fn identity(n: usize) -> Series {
        assert!(n >= 1, "series order must be at least 1");
        Series {
            coeffs: vec![FieldElem::zero(); n],
        }
    }

    pub fn from_coeffs(coeffs: Vec<FieldElem>) -> Result<Series, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::ZeroOrder);
        }
        Ok(Series { coeffs })
    }

    /// Convenience constructor for rational integer coefficients.
    pub fn from_ints(coeffs: &[i64]) -> Series {
        Series::from_coeffs(coeffs.iter().map(|&c| FieldElem::from_int(c)).collect())
            .expect("nonempty coefficient list")
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    /// Coefficient `c_i`, 1-based.
    pub fn coeff(&self, i: usize) -> &FieldElem {
        &self.coeffs[i - 1]
    }

    pub fn into_coeffs(self) -> Vec<FieldElem> {
        self.coeffs
    }

    pub fn is_identity(&self) -> bool {
        self.coeffs.iter().all(FieldElem::is_zero)
    }

    /// Smallest `i` with `c_i != 0`; `None` for the identity.
    pub fn ord(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero()).map(|i| i + 1)
    }

    pub fn symbols(&self) -> BTreeSet<u32> {
        self.coeffs.iter().flat_map(FieldElem::symbols).collect()
    }

    fn check_order(&self, other: &Series) -> Result<(), SeriesError> {
        if self.order() != other.order() {
            return Err(SeriesError::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    /// `[1, c1, ..., cN]`, i.e. the series divided by `r`.
    fn quotient_by_r(&self) -> Vec<FieldElem> {
        let mut v = Vec::with_capacity(self.order() + 1);
        v.push(FieldElem::one());
        v.extend(self.coeffs.iter().cloned());
        v
    }

    /// `f.compose(g) = f(g(r))`.
    ///
    /// Horner evaluation of `f` at `g`, truncating every intermediate product
    /// to the degree that can still reach the result.
    pub fn compose(&self, g: &Series) -> Result<Series, SeriesError> {
        self.check_order(g)?;
        let n = self.order();
        if g.is_identity() {
            return Ok(self.clone());
        }
        if self.is_identity() {
            return Ok(g.clone());
        }
        let gq = g.quotient_by_r();
        // f(g) = r G H(rG) with H(y) = 1 + sum f_i y^i and G = g / r.
        let mut acc = vec![self.coeffs[n - 1].clone()];
        for i in (0..n).rev() {
            let fi = if i == 0 {
                FieldElem::one()
            } else {
                self.coeffs[i - 1].clone()
            };
            let deg = n - i;
            let prod = mul_trunc(&gq, &acc, deg - 1)?;
            let mut next = Vec::with_capacity(deg + 1);
            next.push(fi);
            next.extend(prod);
            next.resize(deg + 1, FieldElem::zero());
            acc = next;
        }
        let full = mul_trunc(&gq, &acc, n)?;
        Ok(Series {
            coeffs: full.into_iter().skip(1).collect(),
        })
    }

    /// Compositional inverse by triangular back-substitution: the unknown
    /// coefficient `h_i` enters coefficient `i` of `h(f)` with multiplier one.
    pub fn inverse(&self) -> Result<Series, SeriesError> {
        let n = self.order();
        if self.is_identity() {
            return Ok(self.clone());
        }
        let fq = self.quotient_by_r();
        // powers[k] = (f/r)^(k+1), truncated to degree n - k.
        let mut powers: Vec<Vec<FieldElem>> = Vec::with_capacity(n);
        powers.push(fq.clone());
        for k in 1..n {
            let p = mul_trunc(&powers[k - 1], &fq, n - k)?;
            powers.push(p);
        }
        let mut h: Vec<FieldElem> = Vec::with_capacity(n);
        for i in 1..=n {
            let mut acc = self.coeffs[i - 1].clone();
            for j in 1..i {
                let hj = &h[j - 1];
                if hj.is_zero() {
                    continue;
                }
                let pij = &powers[j][i - j];
                if pij.is_zero() {
                    continue;
                }
                acc = acc.add_ref(&hj.mul_ref(pij));
            }
            acc.check_terms()?;
            h.push(-acc);
        }
        Ok(Series { coeffs: h })
    }

    /// `n`-fold product by binary exponentiation; negative `n` uses the
    /// inverse.
    pub fn power(&self, n: i64) -> Result<Series, SeriesError> {
        let mut base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Series::identity(self.order());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base)?;
            }
        }
        Ok(acc)
    }

    /// `g^-1 * f * g`.
    pub fn conjugate(&self, g: &Series) -> Result<Series, SeriesError> {
        self.check_order(g)?;
        g.inverse()?.compose(self)?.compose(g)
    }

    /// `f * g * f^-1 * g^-1`.
    pub fn commutator(&self, g: &Series) -> Result<Series, SeriesError> {
        self.check_order(g)?;
        let fg = self.compose(g)?;
        let gf = g.compose(self)?;
        fg.compose(&gf.inverse()?)
    }

    /// Keeps the first `m` coefficients: the image in `G[[r]] / G_(m+1)`.
    pub fn truncate(&self, m: usize) -> Result<Series, SeriesError> {
        if m > self.order() {
            return Err(SeriesError::CannotExtend {
                requested: m,
                order: self.order(),
            });
        }
        Series::from_coeffs(self.coeffs[..m].to_vec())
    }

    /// Pads with zero coefficients up to order `m`; used for elements that
    /// are polynomials in `r` (e.g. finitely supported inputs).
    pub fn pad(&self, m: usize) -> Series {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(m.max(coeffs.len()), FieldElem::zero());
        coeffs.truncate(m.max(1));
        Series { coeffs }
    }

    pub fn substitute(&self, point: &HashMap<u32, Rational>) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(|c| c.substitute(point)).collect(),
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&FieldElem) -> FieldElem) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn max_terms(&self) -> usize {
        self.coeffs
            .iter()
            .map(FieldElem::num_terms)
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = i + 2;
            match c.as_constant() {
                Some(q) if q == integer(1) => write!(f, " + r^{e}")?,
                Some(q) if q == integer(-1) => write!(f, " - r^{e}")?,
                Some(q) if q < integer(0) => write!(f, " - {}*r^{e}", rational_to_string(&-q))?,
                Some(q) => write!(f, " + {}*r^{e}", rational_to_string(&q))?,
                None => write!(f, " + ({c})*r^{e}")?,
            }
        }
        write!(f, " + O(r^{})", self.order() + 2)
    }
}

#[derive(Serialize)]
struct SeriesJsonRef<'a> {
    order: usize,
    coeffs: &'a [FieldElem],
}

#[derive(Deserialize)]
struct SeriesJson {
    order: usize,
    coeffs: Vec<FieldElem>,
}

impl Serialize for Series {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SeriesJsonRef {
            order: self.order(),
            coeffs: &self.coeffs,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Series {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = SeriesJson::deserialize(deserializer)?;
        if raw.order == 0 || raw.coeffs.len() != raw.order {
            return Err(de::Error::custom(format!(
                "series order {} does not match {} coefficients",
                raw.order,
                raw.coeffs.len()
            )));
        }
        Ok(Series { coeffs: raw.coeffs })
    }
}
