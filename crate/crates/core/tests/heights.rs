use cmorbit::classgroup::reduced_forms;
use cmorbit::exact::arith::fundamental_discriminants;
use cmorbit::heights::{
    bost_check, calibrate, class_number_value, height_report, kronecker_character, l_value_at_zero,
    log_delta_invariant, DEFAULT_PRECISION,
};
use cmorbit::exact::Ball;

#[test]
fn l_value_is_class_number() {
    for d in fundamental_discriminants(-3000, -1) {
        let h = reduced_forms(d).unwrap().len() as u64;
        assert_eq!(l_value_at_zero(&kronecker_character(d).unwrap()), class_number_value(d, h), "D = {d}");
    }
}

#[test]
fn calibrated_routes_and_floor() {
    let cal = calibrate(DEFAULT_PRECISION).unwrap();
    assert!((cal.c0 + std::f64::consts::LN_2 + 0.5 * std::f64::consts::PI.ln()).abs() < 1e-12);
    let reports: Vec<_> = fundamental_discriminants(-120, -1)
        .into_iter()
        .map(|d| height_report(d, &cal, DEFAULT_PRECISION).unwrap())
        .collect();
    for r in &reports {
        assert!(r.discrepancy <= 1e-8, "D = {}", r.discriminant);
    }
    let bost = bost_check(&reports).unwrap();
    assert!(bost.pass);
    assert_eq!(bost.discriminant, -3);
}

#[test]
fn delta_at_i() {
    // |Delta(i)| = Gamma(1/4)^24 / (2^24 pi^18)
    let v = log_delta_invariant(&Ball::zero(128), &Ball::one(128)).unwrap().to_f64();
    let g = 3.625_609_908_221_908_f64;
    let expected = 24.0 * g.ln() - 24.0 * std::f64::consts::LN_2 - 18.0 * std::f64::consts::PI.ln();
    assert!((v - expected).abs() < 1e-12);
}
