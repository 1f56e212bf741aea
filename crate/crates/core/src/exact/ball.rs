use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact binary fraction `man * 2^exp`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

impl Dyadic {
    pub fn new(man: BigInt, exp: i64) -> Self {
        if man.is_zero() {
            return Dyadic { man, exp: 0 };
        }
        let tz = man.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            Dyadic {
                man: man >> tz,
                exp: exp + tz as i64,
            }
        } else {
            Dyadic { man, exp }
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            man: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            man: BigInt::one(),
            exp: 0,
        }
    }

    pub fn from_int(n: &BigInt) -> Self {
        Self::new(n.clone(), 0)
    }

    pub fn from_i64(n: i64) -> Self {
        Self::new(BigInt::from(n), 0)
    }

    /// `2^k`.
    pub fn pow2(k: i64) -> Self {
        Dyadic {
            man: BigInt::one(),
            exp: k,
        }
    }

    /// Exact conversion of a finite double.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite double");
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let e = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if e == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), e - 1075)
        };
        Self::new(BigInt::from(m) * sign, e)
    }

    pub fn man(&self) -> &BigInt {
        &self.man
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.man.is_positive()
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            man: self.man.abs(),
            exp: self.exp,
        }
    }

    /// Smallest `k` with `|self| < 2^k`; very negative for zero.
    pub fn mag_bits(&self) -> i64 {
        if self.is_zero() {
            return i64::MIN / 4;
        }
        self.exp + self.man.bits() as i64
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic {
            man: self.man.clone(),
            exp: self.exp + k,
        }
    }

    fn align(&self, o: &Self) -> (BigInt, BigInt, i64) {
        let e = self.exp.min(o.exp);
        let a = &self.man << (self.exp - e) as u64;
        let b = &o.man << (o.exp - e) as u64;
        (a, b, e)
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let (a, b, e) = self.align(o);
        Self::new(a + b, e)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Dyadic {
            man: -&self.man,
            exp: self.exp,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(&self.man * &o.man, self.exp + o.exp)
    }

    pub fn cmp_value(&self, o: &Self) -> Ordering {
        match self.sub(o).man.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }

    fn shr_floor_mag(m: &BigInt, s: u64) -> BigInt {
        BigInt::from(m.magnitude() >> s)
    }

    /// Round to nearest with `prec` mantissa bits; second value bounds the error.
    pub fn round(&self, prec: u32) -> (Self, Option<Self>) {
        let bits = self.man.bits();
        if bits <= prec as u64 {
            return (self.clone(), None);
        }
        let s = bits - prec as u64;
        let half = pow2(s - 1);
        let mag = (self.man.magnitude().clone() + half.magnitude()) >> s;
        let man = if self.man.is_negative() {
            -BigInt::from(mag)
        } else {
            BigInt::from(mag)
        };
        let e = self.exp + s as i64;
        (Self::new(man, e), Some(Self::pow2(e - 1)))
    }

    /// Magnitude rounded up to `bits` mantissa bits (nonnegative result).
    pub fn round_up_mag(&self, bits: u32) -> Self {
        let b = self.man.bits();
        if b <= bits as u64 {
            return self.abs();
        }
        let s = b - bits as u64;
        let mag = Self::shr_floor_mag(&self.man, s) + 1;
        Self::new(mag, self.exp + s as i64)
    }

    /// Magnitude rounded down to `bits` mantissa bits (nonnegative result).
    pub fn round_down_mag(&self, bits: u32) -> Self {
        let b = self.man.bits();
        if b <= bits as u64 {
            return self.abs();
        }
        let s = b - bits as u64;
        Self::new(Self::shr_floor_mag(&self.man, s), self.exp + s as i64)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let b = self.man.bits();
        let (m, e) = if b > 64 {
            let s = b - 64;
            (&self.man >> s, self.exp + s as i64)
        } else {
            (self.man.clone(), self.exp)
        };
        let mf = m.to_f64().unwrap_or(0.0);
        if e > 2000 {
            return mf * f64::INFINITY;
        }
        if e < -2200 {
            return 0.0;
        }
        let h = (e / 2) as i32;
        mf * 2f64.powi(h) * 2f64.powi(e as i32 - h)
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << self.exp as u64
        } else {
            self.man.div_floor(&pow2((-self.exp) as u64))
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(self.neg().floor())
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as u64)
        } else {
            BigRational::new(self.man.clone(), pow2((-self.exp) as u64))
        }
    }

    /// Truncated quotient with at least `prec` bits; second value bounds the error.
    pub fn div(&self, o: &Self, prec: u32) -> (Self, Self) {
        assert!(!o.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return (Self::zero(), Self::zero());
        }
        let shift = (prec as i64 + o.man.bits() as i64 - self.man.bits() as i64 + 2).max(0);
        let num = &self.man << shift as u64;
        let q = &num / &o.man;
        let e = self.exp - shift - o.exp;
        (Self::new(q, e), Self::pow2(e))
    }

    /// Floor square root of a nonnegative value with at least `prec` bits.
    pub fn sqrt(&self, prec: u32) -> (Self, Self) {
        assert!(!self.is_negative(), "square root of negative dyadic");
        if self.is_zero() {
            return (Self::zero(), Self::zero());
        }
        let mut k = (2 * prec as i64 + 4 - self.man.bits() as i64).max(0);
        if (self.exp - k).rem_euclid(2) != 0 {
            k += 1;
        }
        let m = &self.man << k as u64;
        let s = m.sqrt();
        let e = (self.exp - k) / 2;
        (Self::new(s, e), Self::pow2(e))
    }
}

const RAD_BITS: u32 = 30;

fn rad_up(d: Dyadic) -> Dyadic {
    d.round_up_mag(RAD_BITS)
}

/// Real interval `[mid - rad, mid + rad]` with dyadic endpoints.
#[derive(Clone)]
pub struct Ball {
    mid: Dyadic,
    rad: Dyadic,
    prec: u32,
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.17e} +/- {:.3e}", self.mid.to_f64(), self.rad.to_f64())
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Ball {
    pub fn new(mid: Dyadic, rad: Dyadic, prec: u32) -> Self {
        let (m, err) = mid.round(prec);
        let rad = match err {
            Some(e) => rad.abs().add(&e),
            None => rad.abs(),
        };
        Ball {
            mid: m,
            rad: rad_up(rad),
            prec,
        }
    }

    pub fn exact(mid: Dyadic, prec: u32) -> Self {
        Self::new(mid, Dyadic::zero(), prec)
    }

    pub fn zero(prec: u32) -> Self {
        Self::exact(Dyadic::zero(), prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::exact(Dyadic::one(), prec)
    }

    pub fn from_int(n: &BigInt, prec: u32) -> Self {
        Self::exact(Dyadic::from_int(n), prec)
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Self::exact(Dyadic::from_i64(n), prec)
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        Self::exact(Dyadic::from_f64(x), prec)
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        let n = Dyadic::from_int(q.numer());
        let d = Dyadic::from_int(q.denom());
        let (v, e) = n.div(&d, prec + 2);
        Self::new(v, e, prec)
    }

    pub fn mid(&self) -> &Dyadic {
        &self.mid
    }

    pub fn rad(&self) -> &Dyadic {
        &self.rad
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self::new(self.mid.clone(), self.rad.clone(), prec)
    }

    /// Same midpoint, radius dropped.
    pub fn midpoint_ball(&self) -> Self {
        Ball {
            mid: self.mid.clone(),
            rad: Dyadic::zero(),
            prec: self.prec,
        }
    }

    pub fn add_error(&self, e: &Dyadic) -> Self {
        Ball {
            mid: self.mid.clone(),
            rad: rad_up(self.rad.add(&e.abs())),
            prec: self.prec,
        }
    }

    pub fn upper(&self) -> Dyadic {
        self.mid.add(&self.rad)
    }

    pub fn lower(&self) -> Dyadic {
        self.mid.sub(&self.rad)
    }

    /// Upper bound for `|x|` over the ball.
    pub fn abs_upper(&self) -> Dyadic {
        rad_up(self.mid.abs().add(&self.rad))
    }

    /// Lower bound for `|x|` over the ball (zero if the ball straddles zero).
    pub fn abs_lower(&self) -> Dyadic {
        let d = self.mid.abs().sub(&self.rad);
        if d.is_negative() {
            Dyadic::zero()
        } else {
            d.round_down_mag(RAD_BITS)
        }
    }

    pub fn is_positive(&self) -> bool {
        self.lower().is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.upper().is_negative()
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        self.mid.sub(x).abs().cmp_value(&self.rad) != Ordering::Greater
    }

    pub fn overlaps(&self, o: &Self) -> bool {
        self.mid.sub(&o.mid).abs().cmp_value(&self.rad.add(&o.rad)) != Ordering::Greater
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn rad_f64(&self) -> f64 {
        self.rad.to_f64()
    }

    /// The only integer in the ball, if there is exactly one.
    pub fn unique_integer(&self) -> Option<BigInt> {
        let lo = self.lower().ceil();
        let hi = self.upper().floor();
        (lo == hi).then_some(lo)
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        Ball {
            mid: self.mid.mul_pow2(k),
            rad: self.rad.mul_pow2(k),
            prec: self.prec,
        }
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        let d = Dyadic::from_int(n);
        Self::new(self.mid.mul(&d), rad_up(self.rad.mul(&d.abs())), self.prec)
    }

    pub fn div_int(&self, n: &BigInt) -> Self {
        self.checked_div(&Ball::from_int(n, self.prec))
            .expect("division by nonzero integer")
    }

    pub fn sqr(&self) -> Self {
        self * self
    }

    pub fn abs(&self) -> Self {
        if self.mid.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self> {
        let prec = self.prec.max(o.prec);
        let den_lo = o.abs_lower();
        if den_lo.is_zero() {
            return Err(Error::PrecisionExhausted(prec as u64));
        }
        let (q, qerr) = self.mid.div(&o.mid, prec + 4);
        let qabs = q.abs().add(&qerr);
        let num = self.rad.add(&qabs.mul(&o.rad));
        let (prop, perr) = rad_up(num).div(&den_lo, RAD_BITS);
        let rad = prop.add(&perr).add(&qerr);
        Ok(Self::new(q, rad, prec))
    }

    pub fn recip(&self) -> Result<Self> {
        Ball::one(self.prec).checked_div(self)
    }

    /// Square root; a ball reaching below zero is clipped at zero.
    pub fn sqrt(&self) -> Result<Self> {
        let prec = self.prec;
        if self.is_negative() {
            return Err(Error::PrecisionExhausted(prec as u64));
        }
        let lo = self.lower();
        if !lo.is_positive() {
            let (s, e) = self.upper().sqrt(prec);
            let hi = s.add(&e);
            let half = hi.mul_pow2(-1);
            return Ok(Self::new(half.clone(), half, prec));
        }
        let (s, e) = self.mid.sqrt(prec + 4);
        let (slo, _) = lo.round_down_mag(RAD_BITS + 4).sqrt(RAD_BITS);
        if slo.is_zero() {
            return Err(Error::PrecisionExhausted(prec as u64));
        }
        let (prop, perr) = self.rad.div(&slo, RAD_BITS);
        Ok(Self::new(s, prop.add(&perr).add(&e), prec))
    }

    pub fn max_prec(&self, o: &Self) -> u32 {
        self.prec.max(o.prec)
    }
}

impl Add for &Ball {
    type Output = Ball;
    fn add(self, o: &Ball) -> Ball {
        Ball::new(self.mid.add(&o.mid), self.rad.add(&o.rad), self.max_prec(o))
    }
}

impl Sub for &Ball {
    type Output = Ball;
    fn sub(self, o: &Ball) -> Ball {
        Ball::new(self.mid.sub(&o.mid), self.rad.add(&o.rad), self.max_prec(o))
    }
}

impl Mul for &Ball {
    type Output = Ball;
    fn mul(self, o: &Ball) -> Ball {
        let r = self
            .mid
            .abs()
            .mul(&o.rad)
            .add(&o.mid.abs().mul(&self.rad))
            .add(&self.rad.mul(&o.rad));
        Ball::new(self.mid.mul(&o.mid), rad_up(r), self.max_prec(o))
    }
}

impl Neg for &Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        Ball {
            mid: self.mid.neg(),
            rad: self.rad.clone(),
            prec: self.prec,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident, $t:ty) => {
        impl $tr for $t {
            type Output = $t;
            fn $m(self, o: $t) -> $t {
                (&self).$m(&o)
            }
        }
        impl $tr<&$t> for $t {
            type Output = $t;
            fn $m(self, o: &$t) -> $t {
                (&self).$m(o)
            }
        }
    };
}

forward_owned!(Add, add, Ball);
forward_owned!(Sub, sub, Ball);
forward_owned!(Mul, mul, Ball);

impl Neg for Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        -&self
    }
}

/// Complex ball: a rectangle given by real and imaginary balls.
#[derive(Clone, Debug)]
pub struct ComplexBall {
    pub re: Ball,
    pub im: Ball,
}

impl ComplexBall {
    pub fn new(re: Ball, im: Ball) -> Self {
        ComplexBall { re, im }
    }

    pub fn from_real(re: Ball) -> Self {
        let p = re.prec();
        ComplexBall {
            re,
            im: Ball::zero(p),
        }
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_real(Ball::zero(prec))
    }

    pub fn one(prec: u32) -> Self {
        Self::from_real(Ball::one(prec))
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        ComplexBall {
            re: Ball::from_f64(re, prec),
            im: Ball::from_f64(im, prec),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        ComplexBall {
            re: self.re.with_prec(prec),
            im: self.im.with_prec(prec),
        }
    }

    pub fn midpoint_ball(&self) -> Self {
        ComplexBall {
            re: self.re.midpoint_ball(),
            im: self.im.midpoint_ball(),
        }
    }

    pub fn conj(&self) -> Self {
        ComplexBall {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn norm_sqr(&self) -> Ball {
        &self.re.sqr() + &self.im.sqr()
    }

    /// Upper bound on the modulus.
    pub fn abs_upper(&self) -> Dyadic {
        let a = self.re.abs_upper();
        let b = self.im.abs_upper();
        let s = a.mul(&a).add(&b.mul(&b));
        let (r, e) = s.sqrt(RAD_BITS);
        rad_up(r.add(&e))
    }

    /// Lower bound on the modulus.
    pub fn abs_lower(&self) -> Dyadic {
        let a = self.re.abs_lower();
        let b = self.im.abs_lower();
        let s = a.mul(&a).add(&b.mul(&b));
        s.round_down_mag(2 * RAD_BITS).sqrt(RAD_BITS).0
    }

    pub fn abs(&self) -> Result<Ball> {
        self.norm_sqr().sqrt()
    }

    /// Radius of a disk containing the rectangle, around the midpoint.
    pub fn radius(&self) -> Dyadic {
        let a = self.re.rad();
        let b = self.im.rad();
        let (r, e) = a.mul(a).add(&b.mul(b)).sqrt(RAD_BITS);
        rad_up(r.add(&e))
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn overlaps(&self, o: &Self) -> bool {
        self.re.overlaps(&o.re) && self.im.overlaps(&o.im)
    }

    pub fn scale(&self, s: &Ball) -> Self {
        ComplexBall {
            re: &self.re * s,
            im: &self.im * s,
        }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        ComplexBall {
            re: self.re.mul_pow2(k),
            im: self.im.mul_pow2(k),
        }
    }

    pub fn sqr(&self) -> Self {
        self * self
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self> {
        let d = o.norm_sqr();
        let n = self * &o.conj();
        Ok(ComplexBall {
            re: n.re.checked_div(&d)?,
            im: n.im.checked_div(&d)?,
        })
    }

    /// Enlarge to a disk of the given radius around the current midpoint.
    pub fn inflate(&self, r: &Dyadic) -> Self {
        ComplexBall {
            re: self.re.add_error(r),
            im: self.im.add_error(r),
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for &ComplexBall {
    type Output = ComplexBall;
    fn add(self, o: &ComplexBall) -> ComplexBall {
        ComplexBall {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl Sub for &ComplexBall {
    type Output = ComplexBall;
    fn sub(self, o: &ComplexBall) -> ComplexBall {
        ComplexBall {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl Mul for &ComplexBall {
    type Output = ComplexBall;
    fn mul(self, o: &ComplexBall) -> ComplexBall {
        ComplexBall {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }
}

impl Neg for &ComplexBall {
    type Output = ComplexBall;
    fn neg(self) -> ComplexBall {
        ComplexBall {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

forward_owned!(Add, add, ComplexBall);
forward_owned!(Sub, sub, ComplexBall);
forward_owned!(Mul, mul, ComplexBall);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_roundtrip() {
        for x in [1.5, -0.375, 1e-300, 12345.678, -7.0] {
            assert_eq!(Dyadic::from_f64(x).to_f64(), x);
        }
        let d = Dyadic::from_f64(-2.5);
        assert_eq!(d.floor(), BigInt::from(-3));
        assert_eq!(d.ceil(), BigInt::from(-2));
    }

    #[test]
    fn ball_enclosure() {
        let p = 128;
        let third = Ball::from_rational(&BigRational::new(1.into(), 3.into()), p);
        let one = &(&third + &third) + &third;
        assert!(one.contains(&Dyadic::one()));
        let two = Ball::from_i64(2, p);
        let s = two.sqrt().unwrap();
        let sq = s.sqr();
        assert!(sq.contains(&Dyadic::from_i64(2)));
        assert!(s.rad_f64() < 1e-35);
        assert!((s.to_f64() - std::f64::consts::SQRT_2).abs() < 1e-15);
        let q = Ball::one(p).checked_div(&Ball::from_i64(7, p)).unwrap();
        assert!(q.mul_int(&BigInt::from(7)).contains(&Dyadic::one()));
        assert!(Ball::zero(p).recip().is_err());
        assert_eq!(Ball::from_f64(2.9999, p).unique_integer(), None);
        assert_eq!(
            Ball::new(Dyadic::from_f64(3.01), Dyadic::from_f64(0.1), p).unique_integer(),
            Some(BigInt::from(3))
        );
    }

    #[test]
    fn complex_ops() {
        let p = 96;
        let i = ComplexBall::new(Ball::zero(p), Ball::one(p));
        let m = i.sqr();
        assert!(m.re.contains(&Dyadic::from_i64(-1)) && m.im.contains(&Dyadic::zero()));
        let z = ComplexBall::from_f64(3.0, 4.0, p);
        let a = z.abs().unwrap();
        assert!(a.contains(&Dyadic::from_i64(5)));
        let w = z.checked_div(&z).unwrap();
        assert!(w.re.contains(&Dyadic::one()));
    }
}
