use cmorbit::classgroup::QuadForm;
use cmorbit::siegel::{census, census_brute_force, growth_fit, height_bound_check, CmPoint};
use proptest::prelude::*;

#[test]
fn census_oracle() {
    for x in 1..=16 {
        assert_eq!(census(x).unwrap(), census_brute_force(x), "X = {x}");
    }
    let xs: Vec<u64> = (4..=64).collect();
    assert!(growth_fit(&xs).unwrap().slope >= 3.0);
}

#[test]
fn bound_holds_on_a_window() {
    let s = height_bound_check(3, 20_000);
    assert!(s.pass());
    assert_eq!(s.worst_ratio(), Some(1.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reduction_lands_in_fundamental_domain(a in 1i64..500, b in -500i64..500, c in 1i64..500) {
        prop_assume!(b * b - 4 * a * c < 0);
        let f = QuadForm::new(a, b, c).reduce();
        prop_assert_eq!(f.discriminant(), b * b - 4 * a * c);
        prop_assert!(f.is_reduced());
        let p = CmPoint::new(f, 64).unwrap();
        prop_assert!(p.in_fundamental_domain());
        prop_assert!(3 * f.c <= -f.discriminant());
    }
}
