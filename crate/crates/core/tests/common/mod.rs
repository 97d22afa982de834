#![allow(dead_code)]

use fpgroup::field::{rational, FieldElem, Monomial, Rational};
use fpgroup::liealg::VectorField;
use fpgroup::series::Series;
use proptest::prelude::*;
use rand::Rng;

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_map(|(p, q)| rational(p, q))
}

/// Polynomials with up to `terms` terms in symbols `0..symbols`, each
/// exponent at most `max_exp`.
pub fn field_elem(symbols: u32, max_exp: u32, terms: usize) -> impl Strategy<Value = FieldElem> {
    prop::collection::vec(
        (
            small_rational(),
            prop::collection::vec(0..=max_exp, symbols as usize),
        ),
        0..=terms,
    )
    .prop_map(|raw| {
        FieldElem::from_terms(raw.into_iter().map(|(c, exps)| {
            let m = Monomial::from_pairs(exps.into_iter().enumerate().map(|(i, e)| (i as u32, e)));
            (m, c)
        }))
    })
}

pub fn rational_series(n: usize) -> impl Strategy<Value = Series> {
    prop::collection::vec(small_rational(), n).prop_map(|cs| {
        Series::from_coeffs(cs.into_iter().map(FieldElem::constant).collect()).unwrap()
    })
}

pub fn rational_field(n: usize) -> impl Strategy<Value = VectorField> {
    prop::collection::vec(small_rational(), n).prop_map(|cs| {
        VectorField::from_coeffs(cs.into_iter().map(FieldElem::constant).collect()).unwrap()
    })
}

pub fn symbolic_field(n: usize, symbols: u32) -> impl Strategy<Value = VectorField> {
    prop::collection::vec(field_elem(symbols, 2, 2), n)
        .prop_map(|cs| VectorField::from_coeffs(cs).unwrap())
}

pub fn rand_rational<R: Rng>(rng: &mut R) -> Rational {
    rational(rng.gen_range(-9..=9), rng.gen_range(1..=5))
}

pub fn rand_series<R: Rng>(rng: &mut R, n: usize) -> Series {
    Series::from_coeffs(
        (0..n)
            .map(|_| FieldElem::constant(rand_rational(rng)))
            .collect(),
    )
    .unwrap()
}

pub fn rand_field<R: Rng>(rng: &mut R, n: usize) -> VectorField {
    VectorField::from_coeffs(
        (0..n)
            .map(|_| FieldElem::constant(rand_rational(rng)))
            .collect(),
    )
    .unwrap()
}

/// Coefficient list of `f(g(r))` by expanding `g^(k+1)` as plain truncated
/// polynomial products.
pub fn naive_compose(f: &Series, g: &Series) -> Vec<FieldElem> {
    let n = f.order();
    // full power series in r, index = exponent
    let mut gr = vec![FieldElem::zero(); n + 2];
    gr[1] = FieldElem::one();
    for i in 1..=n {
        gr[i + 1] = g.coeff(i).clone();
    }
    let mul = |a: &[FieldElem], b: &[FieldElem]| {
        let mut out = vec![FieldElem::zero(); n + 2];
        for i in 0..=n + 1 {
            for j in 0..=n + 1 - i {
                out[i + j] = out[i + j].add_ref(&a[i].mul_ref(&b[j]));
            }
        }
        out
    };
    let mut total = gr.clone();
    let mut pw = gr.clone();
    for k in 1..=n {
        pw = mul(&pw, &gr);
        for (e, c) in pw.iter().enumerate() {
            total[e] = total[e].add_ref(&c.mul_ref(f.coeff(k)));
        }
    }
    total[2..].to_vec()
}

/// Exponential coefficients by listing every composition `(i1, .., ik)` of
/// each index explicitly.
pub fn exp_by_compositions(a: &VectorField) -> Vec<FieldElem> {
    fn go(
        a: &VectorField,
        remaining: usize,
        partial: usize,
        prod: FieldElem,
        k: usize,
        out: &mut Vec<(usize, FieldElem)>,
    ) {
        if remaining == 0 {
            out.push((k, prod));
            return;
        }
        for p in 1..=remaining {
            // every part after the first carries the weight (i1 + .. + ij + 1)
            // of the partial sum before it
            let w = if partial == 0 { 1 } else { partial as i64 + 1 };
            let next = prod.mul_ref(a.coeff(p)).scale_int(w);
            go(a, remaining - p, partial + p, next, k + 1, out);
        }
    }
    let n = a.order();
    (1..=n)
        .map(|m| {
            let mut terms = Vec::new();
            go(a, m, 0, FieldElem::one(), 0, &mut terms);
            terms.into_iter().fold(FieldElem::zero(), |acc, (k, t)| {
                let fact: i64 = (1..=k as i64).product();
                acc.add_ref(&t.div_int(fact).unwrap())
            })
        })
        .collect()
}
