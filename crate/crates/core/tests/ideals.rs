mod oracles;

use cmorbit::exact::Poly;
use cmorbit::field::{construct_field, quadratic_field, NumberField};
use cmorbit::ideal::{count_ideals_of_norm, IntegralIdeal};
use num_bigint::BigInt;
use proptest::prelude::*;

fn field(c: &[i64]) -> NumberField {
    construct_field(&Poly::from_i64(c)).unwrap()
}

#[test]
fn quadratic_counts_match_lattices() {
    for d in [-4, -20, -23] {
        let k = quadratic_field(d).unwrap();
        for n in 1..=200 {
            assert_eq!(count_ideals_of_norm(&k, n).unwrap(), oracles::hnf_ideal_count(&k, n), "D = {d}, n = {n}");
        }
    }
}

#[test]
fn quartic_counts_match_lattices() {
    for c in [[1, 1, 1, 1, 1], [3, 0, 5, 0, 1]] {
        let k = field(&c);
        for n in 1..=60 {
            assert_eq!(count_ideals_of_norm(&k, n).unwrap(), oracles::hnf_ideal_count(&k, n), "{c:?}, n = {n}");
        }
    }
}

#[test]
fn zero_norm_is_rejected() {
    assert!(count_ideals_of_norm(&quadratic_field(-4).unwrap(), 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_is_multiplicative(a in -30i64..30, b in -30i64..30, c in -30i64..30, e in -30i64..30) {
        prop_assume!((a, b) != (0, 0) && (c, e) != (0, 0));
        let k = quadratic_field(-23).unwrap();
        let x = IntegralIdeal::principal(&k, &[BigInt::from(a), BigInt::from(b)]);
        let y = IntegralIdeal::principal(&k, &[BigInt::from(c), BigInt::from(e)]);
        let xy = x.mul(&y).unwrap();
        prop_assert_eq!(xy.norm(), &(x.norm() * y.norm()));
        prop_assert!(xy.is_closed());
    }
}
