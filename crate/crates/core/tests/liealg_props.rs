mod common;

use common::{
    exp_by_compositions, rational_field, rational_series, small_rational, symbolic_field,
};
use fpgroup::field::FieldElem;
use fpgroup::liealg::{
    bracket, commute, exp, exp_formula, exp_picard, flow, log, proportional, VectorField,
};
use fpgroup::series::Series;
use proptest::prelude::*;

/// Fields whose first nonzero coefficient sits at index 1, 2 or 3.
fn low_order_field(n: usize) -> impl Strategy<Value = VectorField> {
    (
        1usize..=3,
        rational_field(n),
        small_rational().prop_filter("nonzero", |r| *r != fpgroup::field::integer(0)),
    )
        .prop_map(move |(o, a, lead)| {
            let mut cs = a.coeffs().to_vec();
            for c in cs.iter_mut().take(o - 1) {
                *c = FieldElem::zero();
            }
            cs[o - 1] = FieldElem::constant(lead);
            VectorField::from_coeffs(cs).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn exp_formula_matches_picard_rational(a in rational_field(10)) {
        let f = exp_formula(&a).unwrap();
        prop_assert_eq!(&f, &exp_picard(&a).unwrap());
        prop_assert_eq!(f.coeffs().to_vec(), exp_by_compositions(&a));
    }

    #[test]
    fn bracket_is_a_lie_bracket(a in rational_field(8), b in rational_field(8), c in rational_field(8)) {
        let ab = bracket(&a, &b).unwrap();
        prop_assert_eq!(ab.scale(&FieldElem::from_int(-1)), bracket(&b, &a).unwrap());
        let t1 = bracket(&a, &bracket(&b, &c).unwrap()).unwrap();
        let t2 = bracket(&b, &bracket(&c, &a).unwrap()).unwrap();
        let t3 = bracket(&c, &ab).unwrap();
        prop_assert!(t1.add(&t2).unwrap().add(&t3).unwrap().is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(25))]

    #[test]
    fn exp_formula_matches_picard_symbolic(a in symbolic_field(8, 2)) {
        let f = exp_formula(&a).unwrap();
        prop_assert_eq!(&f, &exp_picard(&a).unwrap());
        prop_assert_eq!(f.coeffs().to_vec(), exp_by_compositions(&a));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exp_log_roundtrips(a in rational_field(16), h in rational_series(16)) {
        prop_assert_eq!(log(&exp(&a).unwrap()).unwrap(), a);
        prop_assert_eq!(exp(&log(&h).unwrap()).unwrap(), h);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn proportional_fields_commute(a in rational_field(16), lambda in small_rational(), symbolic in any::<bool>()) {
        let l = if symbolic { FieldElem::symbol(0) } else { FieldElem::constant(lambda) };
        let b = a.scale(&l);
        let c = exp(&a).unwrap().commutator(&exp(&b).unwrap()).unwrap();
        prop_assert!(c.is_identity());
        prop_assert!(commute(&exp(&a).unwrap(), &exp(&b).unwrap()).unwrap());
        if !a.is_zero() {
            prop_assert_eq!(proportional(&b, &a).unwrap(), Some(l));
        }
    }

    #[test]
    fn non_proportional_fields_do_not_commute(a in low_order_field(16), b in low_order_field(16)) {
        prop_assume!(proportional(&b, &a).unwrap().is_none());
        let c = exp(&a).unwrap().commutator(&exp(&b).unwrap()).unwrap();
        prop_assert!(!c.is_identity());
        prop_assert!(!commute(&exp(&a).unwrap(), &exp(&b).unwrap()).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn one_parameter_law(h in rational_series(12)) {
        let alpha = FieldElem::symbol(0);
        let beta = FieldElem::symbol(1);
        let fa = flow(&h, &alpha).unwrap();
        let fb = flow(&h, &beta).unwrap();
        prop_assert_eq!(fa.compose(&fb).unwrap(), flow(&h, &(&alpha + &beta)).unwrap());
        prop_assert_eq!(flow(&fa, &beta).unwrap(), flow(&h, &(&alpha * &beta)).unwrap());
        prop_assert_eq!(flow(&h, &FieldElem::from_int(3)).unwrap(), h.power(3).unwrap());
        prop_assert_eq!(flow(&h, &FieldElem::from_int(-2)).unwrap(), h.power(-2).unwrap());
    }

    #[test]
    fn flows_are_natural(h in rational_series(8), g in rational_series(8)) {
        let alpha = FieldElem::symbol(0);
        let lhs = flow(&h.conjugate(&g).unwrap(), &alpha).unwrap();
        let rhs = flow(&h, &alpha).unwrap().conjugate(&g).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn units() {
    assert!(log(&Series::identity(16)).unwrap().is_zero());
    assert!(exp(&VectorField::zero(16)).unwrap().is_identity());
}
