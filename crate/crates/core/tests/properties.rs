use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use hypertower::basefields::{RationalField, ValuedField};
use hypertower::krasner::{at_level, coset_eq, coset_mul, hyperadd, hypersum_contains, Level};
use hypertower::limit::{
    limit_add, limit_eq, limit_inv, limit_mul, limit_neg, to_approximation, CoherentElement,
};
use hypertower::oag::{
    order_from_hyperadd, trop_hyperadd, trop_member, ExtendedValue, GroupElement, TropSet,
};
use hypertower::tower::project;

fn q5() -> RationalField {
    RationalField::new(5).unwrap()
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-5000i64..=5000, 1i64..=5000)
        .prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn nonzero() -> impl Strategy<Value = BigRational> {
    rational().prop_filter("nonzero", |x| x != &BigRational::from_integer(0.into()))
}

fn value() -> impl Strategy<Value = ExtendedValue> {
    prop_oneof![
        1 => Just(ExtendedValue::Infinity),
        9 => proptest::collection::vec(-20i64..=20, 2)
            .prop_map(|c| ExtendedValue::Finite(GroupElement::from_ints(&c).unwrap())),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn tropical_sum_is_commutative(a in value(), b in value()) {
        prop_assert_eq!(trop_hyperadd(&a, &b).unwrap(), trop_hyperadd(&b, &a).unwrap());
    }

    #[test]
    fn tropical_order_is_total(a in value(), b in value()) {
        let (ab, ba) = (order_from_hyperadd(&a, &b).unwrap(), order_from_hyperadd(&b, &a).unwrap());
        prop_assert!(ab || ba);
        prop_assert_eq!(ab && ba, a == b);
    }

    #[test]
    fn tropical_zero_is_neutral(a in value()) {
        prop_assert_eq!(trop_hyperadd(&a, &ExtendedValue::Infinity).unwrap(), TropSet::Singleton(a.clone()));
        prop_assert!(trop_member(&ExtendedValue::Infinity, &trop_hyperadd(&a, &a).unwrap()).unwrap());
    }

    #[test]
    fn coset_equality_is_the_unit_ratio(x in nonzero(), y in nonzero(), g in 0u32..5) {
        let f = q5();
        let same = coset_eq(&f, &at_level(&f, x.clone(), Level(g)), &at_level(&f, y.clone(), Level(g))).unwrap();
        let diff = f.order(&f.sub(&f.mul(&x, &f.inv(&y).unwrap()), &f.one()));
        prop_assert_eq!(same, diff.is_none_or(|v| v > g as i64));
    }

    #[test]
    fn hypersum_contains_the_plain_sum(x in rational(), y in rational(), g in 0u32..5) {
        let f = q5();
        let l = Level(g);
        let s = hyperadd(&f, &at_level(&f, x.clone(), l), &at_level(&f, y.clone(), l)).unwrap();
        prop_assert!(hypersum_contains(&f, &s, &at_level(&f, f.add(&x, &y), l)).unwrap());
        let t = hyperadd(&f, &at_level(&f, y, l), &at_level(&f, x, l)).unwrap();
        prop_assert_eq!(s.contains_zero(), t.contains_zero());
    }

    #[test]
    fn projection_is_multiplicative(x in rational(), y in rational(), lo in 0u32..4, up in 0u32..4) {
        let f = q5();
        let (lo, up) = (Level(lo.min(up)), Level(lo.max(up)));
        let (cx, cy) = (at_level(&f, x, up), at_level(&f, y, up));
        let lhs = project(&f, &coset_mul(&f, &cx, &cy).unwrap(), lo).unwrap();
        let rhs = coset_mul(&f, &project(&f, &cx, lo).unwrap(), &project(&f, &cy, lo).unwrap()).unwrap();
        prop_assert!(coset_eq(&f, &lhs, &rhs).unwrap());
    }

    #[test]
    fn limit_ring_laws(x in rational(), y in rational(), z in rational()) {
        let f = q5();
        let n = 12;
        let [a, b, c] = [x, y, z].map(|v| CoherentElement::from_field(&f, v));
        let ab_c = limit_mul(&limit_add(&a, &b).unwrap().0, &c).unwrap();
        let ac_bc = limit_add(&limit_mul(&a, &c).unwrap(), &limit_mul(&b, &c).unwrap()).unwrap().0;
        prop_assert!(limit_eq(&ab_c, &ac_bc, n).unwrap().is_equal());
        let zero = limit_add(&a, &limit_neg(&a).unwrap()).unwrap().0;
        prop_assert!(zero.is_certified_zero());
    }

    #[test]
    fn limit_inverse_and_ledger(x in nonzero(), y in rational()) {
        let f = q5();
        let a = CoherentElement::from_field(&f, x.clone());
        let one = limit_mul(&a, &limit_inv(&a).unwrap()).unwrap();
        prop_assert!(limit_eq(&one, &CoherentElement::from_field(&f, f.one()), 12).unwrap().is_equal());
        let b = CoherentElement::from_field(&f, y.clone());
        let (_, ledger) = limit_add(&a, &b).unwrap();
        if let Some(d) = ledger.delivered(20) {
            prop_assert_eq!(d as u64 + ledger.total_loss(), 20);
        }
        prop_assert_eq!(ledger.input_level_for(8), 8 + ledger.total_loss());
    }

    #[test]
    fn coherent_levels_are_compatible(x in nonzero(), hi in 1u32..12) {
        let f = q5();
        let e = CoherentElement::from_field(&f, x);
        let top = e.at(Level(hi)).unwrap();
        for g in 0..hi {
            let below = e.at(Level(g)).unwrap();
            prop_assert!(coset_eq(&f, &project(&f, &top, Level(g)).unwrap(), &below).unwrap());
        }
    }

    #[test]
    fn digits_reproduce_the_element(x in nonzero()) {
        let f = q5();
        let approx = to_approximation(&CoherentElement::from_field(&f, x.clone()), 10).unwrap();
        let direct = f.expand(&x, 10).unwrap();
        prop_assert_eq!(approx.shift, direct.shift);
        prop_assert_eq!(approx.digits, direct.digits);
    }
}
