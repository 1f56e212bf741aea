//! Kronecker characters, `log Gamma` at rationals, and `L(0, chi)`, `L'(0, chi)`
//! through the Hurwitz zeta function.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::arith::{is_fundamental_discriminant, kronecker};
use crate::exact::transc::{bernoulli, ln, pi};
use crate::exact::Ball;

/// The Kronecker character `a -> (D/a)` of a fundamental discriminant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletCharacter {
    pub discriminant: i64,
    /// Conductor `|D|`.
    pub modulus: u64,
    /// `values[a]` for `0 <= a < modulus`.
    pub values: Vec<i8>,
    pub odd: bool,
}

impl DirichletCharacter {
    pub fn value(&self, a: i64) -> i8 {
        self.values[a.rem_euclid(self.modulus as i64) as usize]
    }

    pub fn sum(&self) -> i64 {
        self.values.iter().map(|&v| v as i64).sum()
    }
}

pub fn kronecker_character(d: i64) -> Result<DirichletCharacter> {
    if !is_fundamental_discriminant(d) {
        return Err(Error::NonFundamental(d));
    }
    let f = d.unsigned_abs();
    let values = (0..f).map(|a| kronecker(d, a as i64) as i8).collect::<Vec<_>>();
    Ok(DirichletCharacter { discriminant: d, modulus: f, values, odd: d < 0 })
}

/// Bernoulli numbers, extended on demand.
fn bernoulli_upto(n: usize) -> Vec<BigRational> {
    static CACHE: Mutex<Vec<BigRational>> = Mutex::new(Vec::new());
    let mut c = CACHE.lock().unwrap();
    if c.len() <= n {
        *c = bernoulli(n.max(2 * c.len()));
    }
    c[..=n].to_vec()
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `B_2k / (2k (2k - 1))` for `k = 1..=terms` as balls at precision `w`.
fn stirling_coefficients(terms: usize, w: u32) -> Vec<Ball> {
    static CACHE: Mutex<Vec<(u32, Vec<Ball>)>> = Mutex::new(Vec::new());
    let mut c = CACHE.lock().unwrap();
    if let Some((_, v)) = c.iter().find(|(p, v)| *p == w && v.len() >= terms) {
        return v[..terms].to_vec();
    }
    let b = bernoulli_upto(2 * terms);
    let v: Vec<Ball> = (1..=terms)
        .map(|k| {
            let q = &b[2 * k] / BigRational::from_integer(BigInt::from((2 * k) * (2 * k - 1)));
            Ball::from_rational(&q, w)
        })
        .collect();
    c.retain(|(p, _)| *p != w);
    c.push((w, v.clone()));
    v
}

/// `log Gamma(x)` for a positive rational, by Stirling's series after shifting
/// the argument up with the recurrence.
pub fn ln_gamma(x: &BigRational, prec: u32) -> Result<Ball> {
    if !x.is_positive() {
        return Err(Error::DegenerateInput("log Gamma needs a positive argument".into()));
    }
    let w = prec + 24;
    // shift so that the series error B_{2m}/(2m(2m-1) z^{2m-1}) is below 2^-w
    let shift = (w as i64 / 4).max(12);
    let terms = (w as usize / 6).max(8);
    // Gamma(x) = Gamma(x + N) / prod_{j < N} (x + j), kept as an integer over q^N
    let (p, q) = (x.numer().clone(), x.denom().clone());
    let mut num = BigInt::one();
    let mut top = p.clone();
    let mut count = 0i64;
    let limit = &q * shift;
    while top < limit {
        num *= &top;
        top += &q;
        count += 1;
    }
    let z = Ball::from_rational(&BigRational::new(top, q.clone()), w);
    let lnz = ln(&z)?;
    let half = Ball::one(w).mul_pow2(-1);
    let two_pi = pi(w).mul_pow2(1);
    let mut s = &(&(&z - &half) * &lnz) - &z;
    s = &s + &ln(&two_pi)?.mul_pow2(-1);
    let coeffs = stirling_coefficients(terms + 1, w);
    let inv = Ball::one(w).checked_div(&z)?;
    let inv2 = inv.sqr();
    let mut zpow = inv;
    for c in &coeffs[..terms] {
        s = &s + &(c * &zpow);
        zpow = &zpow * &inv2;
    }
    // for real z > 0 the remainder is bounded by the first omitted term
    let tail = (&coeffs[terms] * &zpow).abs_upper();
    s = s.add_error(&tail);
    if count > 0 {
        let shift_ln = &ln(&Ball::from_int(&num, w))? - &ln(&Ball::from_int(&q, w))?.mul_int(&BigInt::from(count));
        s = &s - &shift_ln;
    }
    Ok(s.with_prec(prec))
}

/// `(zeta(0, x), zeta'(0, x))` for `0 < x <= 1`.
pub fn hurwitz_at_zero(x: &BigRational, prec: u32) -> Result<(BigRational, Ball)> {
    if !x.is_positive() || x > &BigRational::one() {
        return Err(Error::DegenerateInput("Hurwitz argument must lie in (0, 1]".into()));
    }
    let w = prec + 16;
    let value = rat(1, 2) - x;
    let two_pi = pi(w).mul_pow2(1);
    let d = &ln_gamma(x, w)? - &ln(&two_pi)?.mul_pow2(-1);
    Ok((value, d.with_prec(prec)))
}

/// `L(0, chi)` as the exact sum of Hurwitz values `chi(a) (1/2 - a/f)`.
pub fn l_value_at_zero(chi: &DirichletCharacter) -> BigRational {
    let f = chi.modulus as i64;
    let (mut s0, mut s1) = (0i64, 0i64);
    for a in 1..f {
        let c = chi.value(a) as i64;
        s0 += c;
        s1 += c * a;
    }
    BigRational::new(BigInt::from(f * s0 - 2 * s1), BigInt::from(2 * f))
}

/// `(L(0, chi), L'(0, chi))` for an odd character: the value is the exact
/// rational `-(1/f) sum chi(a) a`.
pub fn dirichlet_l_at_zero(chi: &DirichletCharacter, prec: u32) -> Result<(BigRational, Ball)> {
    if !chi.odd {
        return Err(Error::EvenCharacter);
    }
    let f = chi.modulus as i64;
    let w = prec + 16 + (64 - (f as u64).leading_zeros());
    let mut l0 = BigRational::zero();
    let mut deriv = Ball::zero(w);
    for a in 1..f {
        let c = chi.value(a);
        if c == 0 {
            continue;
        }
        let x = rat(a, f);
        let (z0, z1) = hurwitz_at_zero(&x, w)?;
        if c > 0 {
            l0 += z0;
            deriv = &deriv + &z1;
        } else {
            l0 -= z0;
            deriv = &deriv - &z1;
        }
    }
    let lnf = ln(&Ball::from_i64(f, w))?;
    deriv = &deriv - &(&Ball::from_rational(&l0, w) * &lnf);
    Ok((l0, deriv.with_prec(prec)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn characters() {
        let c4 = kronecker_character(-4).unwrap();
        assert_eq!((c4.value(1), c4.value(3)), (1, -1));
        let c3 = kronecker_character(-3).unwrap();
        assert_eq!(c3.value(2), -1);
        assert_eq!(kronecker_character(-20).unwrap().sum(), 0);
        assert_eq!(kronecker_character(-8).unwrap().value(-1), -1);
        assert!(kronecker_character(-16).is_err());
    }

    #[test]
    fn gamma_values() {
        // log Gamma(1/2) = log(pi)/2
        let g = ln_gamma(&rat(1, 2), 128).unwrap();
        assert!((g.to_f64() - 0.5723649429247001).abs() < 1e-15);
        assert!(g.rad_f64() < 1e-30);
        let g = ln_gamma(&rat(1, 1), 128).unwrap();
        assert!(g.to_f64().abs() < 1e-30);
        let (_, d) = hurwitz_at_zero(&rat(1, 2), 128).unwrap();
        assert!((d.to_f64() + 0.5 * std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn small_l_values() {
        let (l, _) = dirichlet_l_at_zero(&kronecker_character(-4).unwrap(), 64).unwrap();
        assert_eq!(l, rat(1, 2));
        let (l, _) = dirichlet_l_at_zero(&kronecker_character(-3).unwrap(), 64).unwrap();
        assert_eq!(l, rat(1, 3));
        assert!(matches!(dirichlet_l_at_zero(&kronecker_character(5).unwrap(), 64), Err(Error::EvenCharacter)));
    }
}
