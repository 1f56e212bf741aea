use cmorbit::classgroup::{reduced_forms_class_group, ClassGroup};
use cmorbit::exact::arith::fundamental_discriminants;
use cmorbit::exact::Poly;
use cmorbit::field::{construct_field, quadratic_field};
use num_bigint::BigInt;

#[test]
fn relations_agree_with_forms() {
    for d in fundamental_discriminants(-600, -1) {
        let cl = ClassGroup::new(&quadratic_field(d).unwrap()).unwrap();
        let forms = reduced_forms_class_group(d).unwrap();
        let expected: Vec<BigInt> = forms.elementary_divisors.iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(cl.elementary_divisors(), &expected[..], "D = {d}");
    }
}

#[test]
fn known_quartic_groups() {
    let z5 = construct_field(&Poly::from_i64(&[1, 1, 1, 1, 1])).unwrap();
    assert!(ClassGroup::new(&z5).unwrap().is_trivial());
    let k = construct_field(&Poly::from_i64(&[0, 0, 0, 0, 1]));
    assert!(k.is_err());
}

#[test]
fn discrete_logs_respect_products() {
    let k = quadratic_field(-71).unwrap();
    let cl = ClassGroup::new(&k).unwrap();
    assert_eq!(cl.order(), BigInt::from(7));
    let gens = cl.generators().unwrap();
    let g = &gens[0];
    let g3 = g.pow(3);
    assert_eq!(cl.dlog(&g3).unwrap(), cl.scale(&cl.dlog(g).unwrap(), &BigInt::from(3)));
    assert!(cl.is_principal(&g.pow(7)).unwrap().is_some());
    assert!(cl.is_principal(g).unwrap().is_none());
}
