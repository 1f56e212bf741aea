use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::ball::{Ball, ComplexBall};
use crate::error::{Error, Result};

fn cache() -> &'static Mutex<HashMap<(u8, u32), Ball>> {
    static C: OnceLock<Mutex<HashMap<(u8, u32), Ball>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(tag: u8, prec: u32, f: impl FnOnce(u32) -> Ball) -> Ball {
    if let Some(b) = cache().lock().unwrap().get(&(tag, prec)) {
        return b.clone();
    }
    let b = f(prec);
    cache().lock().unwrap().insert((tag, prec), b.clone());
    b
}

/// `atan(1/k)` for an integer `k ≥ 2` by the alternating series.
fn atan_inv(k: u64, prec: u32) -> Ball {
    let w = prec + 16;
    let kb = BigInt::from(k);
    let k2 = BigInt::from(k * k);
    let mut pow = Ball::one(w).div_int(&kb);
    let mut sum = Ball::zero(w);
    let mut j = 0u64;
    loop {
        let term = pow.div_int(&BigInt::from(2 * j + 1));
        if term.abs_upper().mag_bits() < -(w as i64) - 4 {
            // alternating with decreasing terms: tail bounded by this term
            sum = sum.add_error(&term.abs_upper());
            break;
        }
        sum = if j % 2 == 0 { &sum + &term } else { &sum - &term };
        pow = pow.div_int(&k2);
        j += 1;
    }
    sum
}

/// π.
pub fn pi(prec: u32) -> Ball {
    cached(0, prec, |prec| {
        let a = atan_inv(5, prec).mul_int(&BigInt::from(16));
        let b = atan_inv(239, prec).mul_int(&BigInt::from(4));
        (&a - &b).with_prec(prec)
    })
}

/// `atanh(z)` for |z| ≤ 1/2.
fn atanh_small(z: &Ball) -> Ball {
    let w = z.prec();
    let z2 = z.sqr();
    let mut pow = z.clone();
    let mut sum = Ball::zero(w);
    let mut j = 0u64;
    loop {
        let term = pow.div_int(&BigInt::from(2 * j + 1));
        let mag = pow.abs_upper();
        if mag.mag_bits() < -(w as i64) - 4 {
            // tail ≤ |z|^(2j+1) / (1 - z^2) ≤ 2 |z|^(2j+1)
            sum = sum.add_error(&mag.mul_pow2(1));
            break;
        }
        sum = &sum + &term;
        pow = &pow * &z2;
        j += 1;
    }
    sum
}

/// ln 2.
pub fn ln2(prec: u32) -> Ball {
    cached(1, prec, |prec| {
        let w = prec + 16;
        let third = Ball::one(w).div_int(&BigInt::from(3));
        atanh_small(&third).mul_pow2(1).with_prec(prec)
    })
}

/// Natural logarithm of a positive ball.
pub fn ln(x: &Ball) -> Result<Ball> {
    let prec = x.prec();
    if !x.is_positive() {
        return Err(Error::PrecisionExhausted(prec as u64));
    }
    let w = prec + 16;
    // x = y 2^k with y in [2/3, 4/3]
    let m = x.mid();
    let mut k = m.mag_bits() - 1;
    let y0 = m.mul_pow2(-k);
    if y0.to_f64() > 4.0 / 3.0 {
        k += 1;
    }
    let y = x.with_prec(w).mul_pow2(-k);
    let one = Ball::one(w);
    let z = (&y - &one).checked_div(&(&y + &one))?;
    let s = atanh_small(&z).mul_pow2(1);
    let r = &s + &ln2(w).mul_int(&BigInt::from(k));
    Ok(r.with_prec(prec))
}

/// Exponential.
pub fn exp(x: &Ball) -> Ball {
    let prec = x.prec();
    let xf = x.to_f64();
    let guard = 16 + (xf.abs().log2().max(0.0) as u32);
    let w = prec + guard;
    let k = (xf / std::f64::consts::LN_2).round() as i64;
    let r = &x.with_prec(w) - &ln2(w).mul_int(&BigInt::from(k));
    // r/2^s with |r/2^s| ≤ 2^-s
    let s = 8i64;
    let t = r.mul_pow2(-s);
    let mut sum = Ball::one(w);
    let mut term = Ball::one(w);
    let mut n = 1u64;
    loop {
        term = (&term * &t).div_int(&BigInt::from(n));
        sum = &sum + &term;
        n += 1;
        let mag = term.abs_upper();
        if mag.mag_bits() < -(w as i64) - 4 {
            // geometric tail with ratio ≤ |t| ≤ 1/2
            sum = sum.add_error(&mag.mul_pow2(1));
            break;
        }
    }
    for _ in 0..s {
        sum = sum.sqr();
    }
    sum.mul_pow2(k).with_prec(prec)
}

/// `(sin x, cos x)`.
pub fn sin_cos(x: &Ball) -> (Ball, Ball) {
    let prec = x.prec();
    let xf = x.to_f64();
    let w = prec + 16 + (xf.abs().log2().max(0.0) as u32);
    let half_pi = pi(w).mul_pow2(-1);
    let k = (xf / std::f64::consts::FRAC_PI_2).round() as i64;
    let r = &x.with_prec(w) - &half_pi.mul_int(&BigInt::from(k));
    // Taylor series with |r| ≤ 0.8
    let mut s = Ball::zero(w);
    let mut c = Ball::zero(w);
    let mut term = Ball::one(w);
    let mut n = 0u64;
    loop {
        let mag = term.abs_upper();
        if n > 2 && mag.mag_bits() < -(w as i64) - 4 {
            s = s.add_error(&mag);
            c = c.add_error(&mag);
            break;
        }
        match n % 4 {
            0 => c = &c + &term,
            1 => s = &s + &term,
            2 => c = &c - &term,
            _ => s = &s - &term,
        }
        n += 1;
        term = (&term * &r).div_int(&BigInt::from(n));
    }
    let (s, c) = match k.rem_euclid(4) {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    };
    (s.with_prec(prec), c.with_prec(prec))
}

/// `exp(z)` for a complex ball.
pub fn cexp(z: &ComplexBall) -> ComplexBall {
    let m = exp(&z.re);
    let (s, c) = sin_cos(&z.im);
    ComplexBall::new(&m * &c, &m * &s)
}

/// Bernoulli numbers `B_0..=B_n` (with `B_1 = -1/2`).
pub fn bernoulli(n: usize) -> Vec<num_rational::BigRational> {
    use num_rational::BigRational;
    let mut b = vec![BigRational::zero(); n + 1];
    b[0] = BigRational::one();
    // Akiyama–Tanigawa
    let mut a: Vec<BigRational> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        a.push(BigRational::new(BigInt::one(), BigInt::from(m + 1)));
        for j in (1..=m).rev() {
            let v = (&a[j - 1] - &a[j]) * BigRational::from_integer(BigInt::from(j));
            a[j - 1] = v;
        }
        b[m] = a[0].clone();
    }
    // the recurrence yields B_1 = +1/2
    if n >= 1 {
        b[1] = -b[1].clone();
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ball::Dyadic;
    use num_rational::BigRational;

    fn close(b: &Ball, x: f64, tol: f64) -> bool {
        (b.to_f64() - x).abs() <= tol && b.rad_f64() < 1e-30
    }

    #[test]
    fn constants() {
        let p = pi(256);
        assert!(close(&p, std::f64::consts::PI, 1e-15));
        // 64 hex digits of pi after the point
        let frac = "243F6A8885A308D313198A2E03707344A4093822299F31D0082EFA98EC4E6C89";
        let v = BigInt::parse_bytes(frac.as_bytes(), 16).unwrap();
        let scaled = p.mul_pow2(256 - 2);
        let lo = scaled.lower().floor();
        let expect = (BigInt::from(3) << 254u32) + (v >> 2u32);
        assert!((lo - expect).magnitude().bits() <= 2);
        assert!(close(&ln2(200), std::f64::consts::LN_2, 1e-16));
    }

    #[test]
    fn exp_ln_roundtrip() {
        for x in [-5.25, -0.5, 0.0, 0.125, 1.0, 3.75, 40.0] {
            let b = Ball::from_f64(x, 200);
            let e = exp(&b);
            assert!((e.to_f64() / x.exp() - 1.0).abs() < 1e-14);
            let back = ln(&e).unwrap();
            assert!(back.contains(&Dyadic::from_f64(x)) || (back.to_f64() - x).abs() < 1e-50);
            assert!(back.rad_f64() < 1e-40);
        }
        assert!(ln(&Ball::zero(64)).is_err());
    }

    #[test]
    fn trig() {
        for x in [0.1, 1.0, 2.5, -4.0, 10.0] {
            let (s, c) = sin_cos(&Ball::from_f64(x, 160));
            assert!((s.to_f64() - x.sin()).abs() < 1e-15);
            assert!((c.to_f64() - x.cos()).abs() < 1e-15);
            let one = &s.sqr() + &c.sqr();
            assert!(one.contains(&Dyadic::one()));
        }
    }

    #[test]
    fn bernoulli_values() {
        let b = bernoulli(12);
        assert_eq!(b[1], BigRational::new((-1).into(), 2.into()));
        assert_eq!(b[2], BigRational::new(1.into(), 6.into()));
        assert_eq!(b[4], BigRational::new((-1).into(), 30.into()));
        assert_eq!(b[12], BigRational::new((-691).into(), 2730.into()));
        assert!(b[3].is_zero());
    }
}
