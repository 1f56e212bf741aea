//! Truncated Euler products used to bracket class numbers.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::exact::arith::{inv_mod, kronecker, mul_mod, primes_up_to};
use crate::exact::fp::{distinct_degree, FpPoly};
use crate::field::units::{regulator, unity_count};
use crate::field::NumberField;
use crate::ideal::primes_above;

/// Primes below this bound are used for quadratic fields.
pub const QUADRATIC_EULER_BOUND: u64 = 100_000;
/// Primes below this bound are used for quartic fields.
pub const QUARTIC_EULER_BOUND: u64 = 200_000;

fn primes() -> &'static [u64] {
    static P: OnceLock<Vec<u64>> = OnceLock::new();
    P.get_or_init(|| primes_up_to(QUARTIC_EULER_BOUND))
}

fn primes_below(bound: u64) -> Vec<u64> {
    if bound <= QUARTIC_EULER_BOUND {
        let ps = primes();
        let end = ps.partition_point(|&p| p < bound);
        ps[..end].to_vec()
    } else {
        primes_up_to(bound - 1)
    }
}

/// `prod_{p < bound} (1 - chi_d(p)/p)^{-1}`, an approximation of `L(1, chi_d)`.
pub fn quadratic_euler_product(d: i64, bound: u64) -> f64 {
    let mut ln = 0.0;
    for p in primes_below(bound) {
        let chi = kronecker(d, p as i64);
        if chi != 0 {
            ln -= (-(chi as f64) / p as f64).ln_1p();
        }
    }
    ln.exp()
}

/// Residue degrees of the primes above `p`.
pub fn residue_degrees(k: &NumberField, p: u64) -> Result<Vec<u32>> {
    residue_degrees_with(k, &k.poly().discriminant(), p)
}

fn residue_degrees_with(k: &NumberField, disc: &BigInt, p: u64) -> Result<Vec<u32>> {
    if (disc % p).to_u64() == Some(0) {
        return Ok(primes_above(k, p)?.iter().map(|q| q.f).collect());
    }
    if let Some(d) = quartic_residue_degrees(k, p) {
        return Ok(d);
    }
    let f = FpPoly::from_int(k.poly(), p);
    let mut out = Vec::new();
    for (g, d) in distinct_degree(&f) {
        for _ in 0..g.degree() / d {
            out.push(d as u32);
        }
    }
    Ok(out)
}

/// `a b mod f` for polynomials of degree below 4 and monic quartic `f`, with
/// `p < 2^24` so that sums of four products fit in 64 bits.
fn mul_mod_quartic(a: &[u64; 4], b: &[u64; 4], f: &[u64; 4], p: u64) -> [u64; 4] {
    let mut t = [0u64; 7];
    for i in 0..4 {
        for j in 0..4 {
            t[i + j] += a[i] * b[j];
        }
    }
    for v in t.iter_mut() {
        *v %= p;
    }
    for i in (4..7).rev() {
        let c = t[i];
        for j in 0..4 {
            t[i - 4 + j] = (t[i - 4 + j] + (p - c) * f[j]) % p;
        }
    }
    [t[0], t[1], t[2], t[3]]
}

fn pow_mod_quartic(base: &[u64; 4], mut e: u64, f: &[u64; 4], p: u64) -> [u64; 4] {
    let mut acc = [1, 0, 0, 0];
    let mut b = *base;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_quartic(&acc, &b, f, p);
        }
        b = mul_mod_quartic(&b, &b, f, p);
        e >>= 1;
    }
    acc
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Degree of `gcd(a, b)` over `F_p`.
fn gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> usize {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let lead = inv_mod(*b.last().unwrap(), p).expect("p is prime");
        while a.len() >= b.len() {
            let c = mul_mod(*a.last().unwrap(), lead, p);
            let shift = a.len() - b.len();
            for (j, &bj) in b.iter().enumerate() {
                a[shift + j] = (a[shift + j] + p - mul_mod(c, bj, p)) % p;
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Splitting type of an unramified prime in a field with a monic quartic
/// defining polynomial, read off from `gcd(f, x^p - x)` and `gcd(f, x^(p^2) - x)`.
fn quartic_residue_degrees(k: &NumberField, p: u64) -> Option<Vec<u32>> {
    let c = k.poly().coeffs();
    if c.len() != 5 || c[4] != 1.into() || p >= 1 << 24 {
        return None;
    }
    let red = |i: usize| {
        let r = &c[i] % p;
        let r = if r < 0.into() { r + p } else { r };
        r.to_u64().unwrap()
    };
    let f = [red(0), red(1), red(2), red(3)];
    let full = vec![f[0], f[1], f[2], f[3], 1];
    let xp = pow_mod_quartic(&[0, 1, 0, 0], p, &f, p);
    let minus_x = |v: [u64; 4]| vec![v[0], (v[1] + p - 1) % p, v[2], v[3]];
    let roots = gcd_degree(full.clone(), minus_x(xp), p);
    Some(match roots {
        4 => vec![1, 1, 1, 1],
        2 => vec![1, 1, 2],
        1 => vec![1, 3],
        _ => {
            let xp2 = pow_mod_quartic(&xp, p, &f, p);
            if gcd_degree(full, minus_x(xp2), p) == 4 {
                vec![2, 2]
            } else {
                vec![4]
            }
        }
    })
}

/// `prod_{p < bound} (1 - 1/p) / prod_{P | p} (1 - 1/N(P))`, approximating the
/// residue of the Dedekind zeta function.
pub fn dedekind_euler_product(k: &NumberField, bound: u64) -> Result<f64> {
    let disc = k.poly().discriminant();
    let mut ln = 0.0;
    for p in primes_below(bound) {
        let pf = p as f64;
        ln += (-1.0 / pf).ln_1p();
        for f in residue_degrees_with(k, &disc, p)? {
            ln -= (-pf.powi(-(f as i32))).ln_1p();
        }
    }
    Ok(ln.exp())
}

/// Analytic class number estimate `w sqrt|D| E / (2^r1 (2 pi)^r2 R)` for a
/// CM field or `Q`.
pub fn class_number_estimate(k: &NumberField) -> Result<f64> {
    let n = k.degree();
    if n == 1 {
        return Ok(1.0);
    }
    if !k.is_cm() {
        return Err(Error::NotCM);
    }
    let (r1, r2) = k.signature();
    let w = unity_count(k)? as f64;
    let d = k.discriminant().to_f64().unwrap().abs();
    let reg = regulator(k)?;
    let e = if n == 2 {
        let di = k.discriminant().to_i64().unwrap();
        quadratic_euler_product(di, QUADRATIC_EULER_BOUND)
    } else {
        dedekind_euler_product(k, QUARTIC_EULER_BOUND)?
    };
    Ok(w * d.sqrt() * e / (2f64.powi(r1 as i32) * (2.0 * PI).powi(r2 as i32) * reg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Poly;
    use crate::field::construct_field;

    #[test]
    fn estimates_are_close() {
        let k = construct_field(&Poly::from_i64(&[6, 1, 1])).unwrap(); // D = -23
        let h = class_number_estimate(&k).unwrap();
        assert!((h - 3.0).abs() < 0.2, "{h}");
        let z5 = construct_field(&Poly::from_i64(&[1, 1, 1, 1, 1])).unwrap();
        let h = class_number_estimate(&z5).unwrap();
        assert!((h - 1.0).abs() < 0.2, "{h}");
    }

    #[test]
    fn residue_degrees_match_primes() {
        let k = construct_field(&Poly::from_i64(&[36, 0, 0, 0, 1])).unwrap();
        for p in [2u64, 3, 5, 7, 11, 13] {
            let mut a = residue_degrees(&k, p).unwrap();
            let mut b: Vec<u32> = primes_above(&k, p).unwrap().iter().map(|q| q.f).collect();
            a.sort();
            b.sort();
            assert_eq!(a, b, "p = {p}");
        }
        let d4 = construct_field(&Poly::from_i64(&[3, 0, 5, 0, 1])).unwrap();
        for p in primes_up_to(400) {
            let mut a = residue_degrees(&d4, p).unwrap();
            let mut b: Vec<u32> = primes_above(&d4, p).unwrap().iter().map(|q| q.f).collect();
            a.sort();
            b.sort();
            assert_eq!(a, b, "p = {p}");
        }
    }
}
