//! Real quadratic fields: fundamental unit by continued fractions and the
//! class number from cycles of reduced indefinite forms.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::arith::is_fundamental_discriminant;

/// Arithmetic invariants of a real quadratic field.
#[derive(Clone, Debug, PartialEq)]
pub struct RealQuadratic {
    pub discriminant: i64,
    /// The fundamental unit `x + y w` greater than one, where `w` is the
    /// standard generator `(1 + sqrt d)/2` or `sqrt(d/4)`.
    pub unit: (BigInt, BigInt),
    pub unit_norm: i32,
    pub regulator: f64,
    pub narrow_class_number: u64,
    pub class_number: u64,
}

/// Natural log of a positive big integer.
pub fn ln_big(n: &BigInt) -> f64 {
    debug_assert!(n.is_positive());
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn trace_norm_of_generator(d: i64) -> (i64, i64) {
    if d.rem_euclid(4) == 1 {
        (1, (1 - d) / 4)
    } else {
        (0, -d / 4)
    }
}

/// Fundamental unit `(x, y, norm)` of the real quadratic field of discriminant `d`.
pub fn fundamental_unit(d: i64) -> Result<(BigInt, BigInt, i32)> {
    if d <= 1 || !is_fundamental_discriminant(d) {
        return Err(Error::InvalidDiscriminant(d));
    }
    let (t, nw) = trace_norm_of_generator(d);
    let (t, nw) = (BigInt::from(t), BigInt::from(nw));
    let d128 = d as i128;
    let s = (d as u64).sqrt() as i128;
    let (mut pp, mut qq) = if d % 4 == 0 { (0i128, 2i128) } else { (1i128, 2i128) };
    // convergents p/q of the generator
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let cap = 40 * (s as usize + 10);
    for _ in 0..cap {
        debug_assert!(qq > 0);
        let a = Integer::div_floor(&(pp + s), &qq);
        let ab = BigInt::from(a);
        let p2 = &ab * &p1 + &p0;
        let q2 = &ab * &q1 + &q0;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let norm = &p1 * &p1 - &p1 * &q1 * &t + &q1 * &q1 * &nw;
        if norm.abs().is_one() {
            let x = &p1 - &q1 * &t;
            let sign = if norm.is_positive() { 1 } else { -1 };
            return Ok((x, q1, sign));
        }
        let np = a * qq - pp;
        qq = (d128 - np * np) / qq;
        pp = np;
    }
    Err(Error::RelationSaturationFailure(cap))
}

/// `ln(x + y w)` for a positive element.
pub fn unit_log(d: i64, x: &BigInt, y: &BigInt) -> f64 {
    // 2(x + y w) = X + Y sqrt d
    let big_x = if d.rem_euclid(4) == 1 { 2 * x + y } else { 2 * x };
    let lx = ln_big(&big_x);
    let ly = ln_big(y) + 0.5 * (d as f64).ln();
    let (hi, lo) = if lx > ly { (lx, ly) } else { (ly, lx) };
    hi + (lo - hi).exp().ln_1p() - std::f64::consts::LN_2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Indef {
    a: i128,
    b: i128,
    c: i128,
}

fn reduced_indefinite(d: i128, s: i128) -> Vec<Indef> {
    let mut out = Vec::new();
    let mut b = if d % 2 == 0 { 2 } else { 1 };
    while b <= s {
        let m = (d - b * b) / 4;
        let mut a0 = 1;
        while a0 * a0 <= m {
            if m % a0 == 0 {
                for a in [a0, m / a0] {
                    let two_a = 2 * a;
                    let lower = d < (two_a + b) * (two_a + b);
                    let upper = two_a - b <= 0 || (two_a - b) * (two_a - b) < d;
                    if lower && upper {
                        for sa in [a, -a] {
                            let f = Indef { a: sa, b, c: -m / sa };
                            if f.a.gcd(&f.b).gcd(&f.c) == 1 {
                                out.push(f);
                            }
                        }
                    }
                    if a0 * a0 == m {
                        break;
                    }
                }
            }
            a0 += 1;
        }
        b += 2;
    }
    out.sort_by_key(|f| (f.a, f.b));
    out.dedup();
    out
}

fn rho(f: Indef, d: i128, s: i128) -> Indef {
    let c = f.c.abs();
    let k = Integer::div_floor(&(s + f.b), &(2 * c));
    let nb = -f.b + 2 * c * k;
    Indef { a: f.c, b: nb, c: (nb * nb - d) / (4 * f.c) }
}

/// Narrow class number: the number of cycles of reduced primitive forms.
pub fn narrow_class_number(d: i64) -> Result<u64> {
    if d <= 1 || !is_fundamental_discriminant(d) {
        return Err(Error::InvalidDiscriminant(d));
    }
    let dd = d as i128;
    let s = (d as u64).sqrt() as i128;
    let forms = reduced_indefinite(dd, s);
    let mut seen = HashSet::new();
    let mut cycles = 0u64;
    for f in &forms {
        if seen.contains(f) {
            continue;
        }
        cycles += 1;
        let mut g = *f;
        loop {
            seen.insert(g);
            g = rho(g, dd, s);
            if g == *f {
                break;
            }
        }
    }
    Ok(cycles)
}

pub fn real_quadratic(d: i64) -> Result<RealQuadratic> {
    let (x, y, unit_norm) = fundamental_unit(d)?;
    let narrow = narrow_class_number(d)?;
    let class_number = if unit_norm == 1 { narrow / 2 } else { narrow };
    let regulator = unit_log(d, &x, &y);
    Ok(RealQuadratic {
        discriminant: d,
        unit: (x, y),
        unit_norm,
        regulator,
        narrow_class_number: narrow,
        class_number,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn units() {
        let u = |d: i64| {
            let (x, y, n) = fundamental_unit(d).unwrap();
            (x.to_i64().unwrap(), y.to_i64().unwrap(), n)
        };
        assert_eq!(u(5), (0, 1, -1));
        assert_eq!(u(8), (1, 1, -1));
        assert_eq!(u(12), (2, 1, 1));
        assert_eq!(u(13), (1, 1, -1));
        // 170 + 39 sqrt 19
        assert_eq!(u(76), (170, 39, 1));
        let r = real_quadratic(5).unwrap();
        assert!((r.regulator - 0.48121182505960347).abs() < 1e-12);
    }

    #[test]
    fn class_numbers() {
        let h = |d: i64| {
            let r = real_quadratic(d).unwrap();
            (r.class_number, r.narrow_class_number)
        };
        assert_eq!(h(5), (1, 1));
        assert_eq!(h(12), (1, 2));
        assert_eq!(h(40), (2, 2));
        assert_eq!(h(60), (2, 4));
        assert_eq!(h(229), (3, 3));
        assert_eq!(h(316), (3, 6));
        assert_eq!(h(328), (4, 4));
        assert!(real_quadratic(20).is_err());
    }
}
