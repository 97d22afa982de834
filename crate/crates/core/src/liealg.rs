//! Formal vector fields, the exponential map and its inverse, flows, and the
//! commutation structure of `G[[r]]_N`.
//!
//! A [`VectorField`] of order `N` stores `(a1, ..., aN)` for `sum a_j e_j`
//! with `e_j = -x^(j+1) d/dx`, so that `[e_i, e_j] = (i - j) e_(i+j)`.
//!
//! Two independent routes compute `exp`:
//! - [`exp_picard`] integrates `dv/dx = sum c_j v^(j+1)`, `v(0) = r`, as a
//!   power series in `r` with polynomial-in-`x` coefficients and evaluates
//!   at `x = 1`;
//! - [`exp_formula`] sums the closed combinatorial expression over
//!   compositions of `i`, grouped by (partial sum, number of parts).
//!
//! [`log`] inverts the second route by triangular solve.

use std::fmt;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{integer, FieldElem, FieldError, Rational};
use crate::series::{Series, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("indeterminate: both vector fields are zero")]
    Indeterminate,
    #[error("fields are proportional only with a non-polynomial ratio")]
    NonPolynomialRatio,
    #[error("trivial base")]
    TrivialBase,
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VectorField {
    coeffs: Vec<FieldElem>,
}

impl VectorField {
    pub fn zero(n: usize) -> Self {
        assert!(n >= 1, "order must be at least 1");
        VectorField {
            coeffs: vec![FieldElem::zero(); n],
        }
    }

    /// `e_j` at order `n`; zero when `j > n`.
    pub fn basis(n: usize, j: usize) -> Self {
        assert!(j >= 1, "basis index starts at 1");
        let mut v = Self::zero(n);
        if j <= n {
            v.coeffs[j - 1] = FieldElem::one();
        }
        v
    }

    pub fn from_coeffs(coeffs: Vec<FieldElem>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::ZeroOrder);
        }
        Ok(VectorField { coeffs })
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        VectorField::from_coeffs(coeffs.iter().map(|&c| FieldElem::from_int(c)).collect())
            .expect("nonempty coefficient list")
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    /// Coefficient of `e_j`, 1-based.
    pub fn coeff(&self, j: usize) -> &FieldElem {
        &self.coeffs[j - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(FieldElem::is_zero)
    }

    pub fn ord(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero()).map(|i| i + 1)
    }

    /// Same field viewed at order `m`: truncated, or padded with zeros.
    pub fn resize(&self, m: usize) -> VectorField {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(m.max(1), FieldElem::zero());
        VectorField { coeffs }
    }

    pub fn scale(&self, lambda: &FieldElem) -> VectorField {
        VectorField {
            coeffs: self.coeffs.iter().map(|c| c.mul_ref(lambda)).collect(),
        }
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField, LieError> {
        check_orders(self.order(), other.order())?;
        Ok(VectorField {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add_ref(b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField, LieError> {
        self.add(&other.scale(&FieldElem::from_int(-1)))
    }
}

fn check_orders(left: usize, right: usize) -> Result<(), LieError> {
    if left != right {
        Err(LieError::OrderMismatch { left, right })
    } else {
        Ok(())
    }
}

/// `[a, b]` truncated at the common order.
pub fn bracket(a: &VectorField, b: &VectorField) -> Result<VectorField, LieError> {
    check_orders(a.order(), b.order())?;
    let n = a.order();
    let mut out = vec![FieldElem::zero(); n];
    for i in 1..n {
        let ai = a.coeff(i);
        if ai.is_zero() {
            continue;
        }
        for j in 1..=(n - i) {
            if i == j {
                continue;
            }
            let bj = b.coeff(j);
            if bj.is_zero() {
                continue;
            }
            let term = ai.mul_ref(bj).scale_int(i as i64 - j as i64);
            out[i + j - 1] = out[i + j - 1].add_ref(&term);
        }
    }
    for c in &out {
        c.check_terms()?;
    }
    Ok(VectorField { coeffs: out })
}

fn factorials(n: usize) -> Vec<Rational> {
    let mut f = vec![integer(1)];
    for k in 1..=n {
        let next = &f[k - 1] * integer(k as i64);
        f.push(next);
    }
    f
}

/// Table `d[m][k]`: sum over compositions `(i1, .., ik)` of `m` of
/// `c_i1 ... c_ik * prod_{j<k} (i1 + .. + ij + 1)`.
struct CompositionTable {
    d: Vec<Vec<FieldElem>>,
}

impl CompositionTable {
    fn new(n: usize) -> Self {
        CompositionTable {
            d: vec![vec![FieldElem::zero(); n + 1]; n + 1],
        }
    }

    /// Fills `d[m][k]` for `k >= 2`, which only involves `c_1..c_(m-1)`.
    fn fill_multi_part(&mut self, m: usize, c: &[FieldElem]) -> Result<(), FieldError> {
        for k in 2..=m {
            let mut acc = FieldElem::zero();
            // the last part is p; the preceding k-1 parts sum to m - p >= k - 1
            for p in 1..=(m + 1 - k) {
                let cp = &c[p - 1];
                let prev = &self.d[m - p][k - 1];
                if cp.is_zero() || prev.is_zero() {
                    continue;
                }
                let w = (m - p + 1) as i64;
                acc = acc.add_ref(&prev.mul_ref(cp).scale_int(w));
            }
            acc.check_terms()?;
            self.d[m][k] = acc;
        }
        Ok(())
    }

    fn multi_part_sum(&self, m: usize, fact: &[Rational]) -> FieldElem {
        (2..=m).fold(FieldElem::zero(), |acc, k| {
            let x = &self.d[m][k];
            if x.is_zero() {
                acc
            } else {
                acc.add_ref(&x.scale(&fact[k].recip()))
            }
        })
    }
}

/// Exponential map by the closed combinatorial sum.
///
/// Coefficient `i` is `sum_k (1/k!) sum_{i1+..+ik=i} c_i1..c_ik
/// prod_{j=1}^{k-1} (i1+..+ij+1)`; the weight is the empty product for
/// `k = 1`.
pub fn exp_formula(a: &VectorField) -> Result<Series, LieError> {
    let n = a.order();
    let fact = factorials(n);
    let mut table = CompositionTable::new(n);
    let mut out = Vec::with_capacity(n);
    for m in 1..=n {
        table.fill_multi_part(m, &a.coeffs)?;
        table.d[m][1] = a.coeffs[m - 1].clone();
        let coeff = a.coeffs[m - 1].add_ref(&table.multi_part_sum(m, &fact));
        coeff.check_terms()?;
        out.push(coeff);
    }
    Ok(Series::from_coeffs(out)?)
}

/// The exponential map used throughout the crate.
pub fn exp(a: &VectorField) -> Result<Series, LieError> {
    exp_formula(a)
}

/// Polynomial in `x` with coefficients in the field, lowest degree first.
type XPoly = Vec<FieldElem>;

fn xpoly_mul(a: &XPoly, b: &XPoly) -> Result<XPoly, FieldError> {
    if a.is_empty() || b.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = vec![FieldElem::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            out[i + j] = out[i + j].add_ref(&x.mul_ref(y));
            out[i + j].check_terms()?;
        }
    }
    Ok(out)
}

fn xpoly_add_scaled(acc: &mut XPoly, p: &XPoly, c: &FieldElem) {
    if acc.len() < p.len() {
        acc.resize(p.len(), FieldElem::zero());
    }
    for (i, x) in p.iter().enumerate() {
        if !x.is_zero() {
            acc[i] = acc[i].add_ref(&x.mul_ref(c));
        }
    }
}

/// Exponential map by integrating the initial value problem
/// `dv/dx = sum c_j v^(j+1)`, `v(0) = r`, and evaluating at `x = 1`.
///
/// Writing `v = r (1 + sum p_i(x) r^i)`, the Picard step for `p_i` only reads
/// `p_1..p_(i-1)`, so iterate `i` fixes `p_i` and later iterates never change
/// it; the iteration is carried out one fixed coefficient at a time.
pub fn exp_picard(a: &VectorField) -> Result<Series, LieError> {
    let n = a.order();
    // pw[m][l] = coefficient of r^l in V^m where V = v / r, for m = 1..=n+1
    let mut pw: Vec<Vec<XPoly>> = vec![Vec::new(); n + 2];
    for row in pw.iter_mut().skip(1) {
        row.push(vec![FieldElem::one()]);
    }
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        // p_i'(x) = sum_j c_j [r^(i-j)] V^(j+1)
        let mut deriv: XPoly = Vec::new();
        for j in 1..=i {
            let cj = a.coeff(j);
            if cj.is_zero() {
                continue;
            }
            xpoly_add_scaled(&mut deriv, &pw[j + 1][i - j], cj);
        }
        let mut p: XPoly = vec![FieldElem::zero()];
        for (deg, c) in deriv.iter().enumerate() {
            p.push(c.div_int(deg as i64 + 1)?);
        }
        let value = p.iter().fold(FieldElem::zero(), |acc, c| acc.add_ref(c));
        value.check_terms()?;
        out.push(value);
        pw[1].push(p);
        // extend V^m by its r^i coefficient for the powers still needed
        for m in 2..=(n + 2 - i).min(n + 1) {
            let mut acc: XPoly = Vec::new();
            for l in 0..=i {
                let prod = xpoly_mul(&pw[m - 1][l], &pw[1][i - l])?;
                xpoly_add_scaled(&mut acc, &prod, &FieldElem::one());
            }
            pw[m].push(acc);
        }
    }
    Ok(Series::from_coeffs(out)?)
}

/// Inverse of [`exp`]: coefficient `a_i` enters coefficient `i` of
/// `exp(a)` with multiplier one, the rest depends on `a_1..a_(i-1)`.
pub fn log(h: &Series) -> Result<VectorField, LieError> {
    let n = h.order();
    let fact = factorials(n);
    let mut table = CompositionTable::new(n);
    let mut a: Vec<FieldElem> = Vec::with_capacity(n);
    for m in 1..=n {
        table.fill_multi_part(m, &a)?;
        let ai = h.coeff(m).sub_ref(&table.multi_part_sum(m, &fact));
        ai.check_terms()?;
        table.d[m][1] = ai.clone();
        a.push(ai);
    }
    Ok(VectorField { coeffs: a })
}

/// `h^alpha = exp(alpha * log h)` for any coefficient `alpha`, including
/// fresh symbols.
pub fn flow(h: &Series, alpha: &FieldElem) -> Result<Series, LieError> {
    if alpha.is_zero() || h.is_identity() {
        return Ok(Series::identity(h.order()));
    }
    exp(&log(h)?.scale(alpha))
}

fn pivot(b: &VectorField) -> Option<usize> {
    b.coeffs.iter().position(|c| !c.is_zero())
}

/// True when `a` and `b` are linearly dependent over the fraction field of
/// the coefficient ring.
pub fn proportional_over_fractions(a: &VectorField, b: &VectorField) -> Result<bool, LieError> {
    check_orders(a.order(), b.order())?;
    let (x, y) = if pivot(b).is_some() { (a, b) } else { (b, a) };
    let Some(j) = pivot(y) else {
        return Ok(true);
    };
    let (xj, yj) = (&x.coeffs[j], &y.coeffs[j]);
    Ok(x.coeffs
        .iter()
        .zip(&y.coeffs)
        .all(|(xi, yi)| xi.mul_ref(yj) == xj.mul_ref(yi)))
}

/// `lambda` with `a = lambda * b`, when `lambda` is a polynomial (or a
/// rational constant).
///
/// Returns [`LieError::NonPolynomialRatio`] when `a` and `b` are
/// proportional only over the fraction field.
pub fn proportional(a: &VectorField, b: &VectorField) -> Result<Option<FieldElem>, LieError> {
    check_orders(a.order(), b.order())?;
    let Some(j) = pivot(b) else {
        return if a.is_zero() {
            Err(LieError::Indeterminate)
        } else {
            Ok(None)
        };
    };
    if a.is_zero() {
        return Ok(Some(FieldElem::zero()));
    }
    let (aj, bj) = (&a.coeffs[j], &b.coeffs[j]);
    let lambda = match bj.as_constant() {
        Some(c) => Some(aj.div_rational(&c)?),
        None => aj.div_exact(bj)?,
    };
    if let Some(lambda) = lambda {
        let fits = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .all(|(ai, bi)| *ai == bi.mul_ref(&lambda));
        return Ok(fits.then_some(lambda));
    }
    if proportional_over_fractions(a, b)? {
        Err(LieError::NonPolynomialRatio)
    } else {
        Ok(None)
    }
}

/// Whether `f` and `g` commute at the truncation order.
///
/// The commutator is the ground truth. Two cross-checks run alongside it:
/// the truncated bracket of the logarithms vanishes exactly when the
/// commutator does, and proportional logarithms always commute. A
/// disagreement is reported as [`LieError::Internal`].
pub fn commute(f: &Series, g: &Series) -> Result<bool, LieError> {
    let direct = f.commutator(g)?.is_identity();
    let (lf, lg) = (log(f)?, log(g)?);
    let bracket_zero = bracket(&lf, &lg)?.is_zero();
    if bracket_zero != direct {
        return Err(LieError::Internal(format!(
            "commutator trivial = {direct} but bracket of logarithms zero = {bracket_zero}"
        )));
    }
    if !direct && proportional_over_fractions(&lf, &lg)? {
        return Err(LieError::Internal(
            "proportional logarithms with nontrivial commutator".into(),
        ));
    }
    Ok(direct)
}

/// `lambda` with `g = h^lambda` at the truncation order, if one exists.
pub fn centralizer_member(g: &Series, h: &Series) -> Result<Option<FieldElem>, LieError> {
    if h.order() != g.order() {
        return Err(LieError::OrderMismatch {
            left: g.order(),
            right: h.order(),
        });
    }
    if h.is_identity() {
        return Err(LieError::TrivialBase);
    }
    proportional(&log(g)?, &log(h)?)
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.is_one() {
                write!(f, "e{}", j + 1)?;
            } else {
                write!(f, "({c})*e{}", j + 1)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct FieldJsonRef<'a> {
    order: usize,
    field_coeffs: &'a [FieldElem],
}

#[derive(Deserialize)]
struct FieldJson {
    order: usize,
    field_coeffs: Vec<FieldElem>,
}

impl Serialize for VectorField {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        FieldJsonRef {
            order: self.order(),
            field_coeffs: &self.coeffs,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for VectorField {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = FieldJson::deserialize(deserializer)?;
        if raw.order == 0 || raw.field_coeffs.len() != raw.order {
            return Err(de::Error::custom(format!(
                "vector field order {} does not match {} coefficients",
                raw.order,
                raw.field_coeffs.len()
            )));
        }
        Ok(VectorField {
            coeffs: raw.field_coeffs,
        })
    }
}
