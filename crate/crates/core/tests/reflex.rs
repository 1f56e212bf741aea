use cmorbit::cm::{enumerate_cm_types, is_self_reflex, reflex};
use cmorbit::exact::Poly;
use cmorbit::field::{canonical_polynomial, construct_field, quadratic_field, NumberField};

fn field(c: &[i64]) -> NumberField {
    construct_field(&Poly::from_i64(c)).unwrap()
}

#[test]
fn imaginary_quadratic_is_self_dual() {
    for d in [-3, -4, -23, -71] {
        let k = quadratic_field(d).unwrap();
        for t in enumerate_cm_types(&k).unwrap() {
            assert!(t.is_primitive());
            let r = reflex(&t).unwrap();
            assert_eq!(canonical_polynomial(r.field()), canonical_polynomial(&k));
        }
    }
}

#[test]
fn cyclotomic_quintic_is_self_reflex() {
    let k = field(&[1, 1, 1, 1, 1]);
    let types = enumerate_cm_types(&k).unwrap();
    assert_eq!(types.len(), 4);
    for t in &types {
        assert!(t.is_primitive());
        assert!(is_self_reflex(t).unwrap());
    }
}

#[test]
fn biquadratic_types_are_imprimitive() {
    let k = field(&[1, 0, 0, 0, 1]);
    let types = enumerate_cm_types(&k).unwrap();
    assert_eq!(types.len(), 4);
    assert!(types.iter().all(|t| !t.is_primitive()));
}

#[test]
fn dihedral_double_reflex() {
    let k = field(&[3, 0, 5, 0, 1]);
    for t in enumerate_cm_types(&k).unwrap().iter().filter(|t| t.is_primitive()) {
        let r = reflex(t).unwrap();
        assert_eq!(r.field().degree(), 4);
        assert_ne!(canonical_polynomial(r.field()), canonical_polynomial(&k));
        assert!(r.double_reflex_recovers_field().unwrap());
    }
}
