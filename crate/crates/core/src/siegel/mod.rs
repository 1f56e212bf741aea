//! CM points of the modular curve: reduced forms as points of the standard
//! fundamental domain, their naive heights, and counts of points of bounded
//! height.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

pub use crate::classgroup::forms::{reduced_forms, QuadForm};
use crate::error::{Error, Result};
use crate::exact::Ball;
use crate::fit::{log_log_fit, LinearFit};

/// The CM point `tau = (-b + sqrt(D))/(2a)` of a reduced form.
#[derive(Clone, Debug)]
pub struct CmPoint {
    pub form: QuadForm,
    pub re: Ball,
    pub im: Ball,
}

impl CmPoint {
    pub fn new(form: QuadForm, prec: u32) -> Result<Self> {
        if !form.is_reduced() {
            return Err(Error::DegenerateInput(format!("form {form} is not reduced")));
        }
        let d = form.discriminant();
        if d >= 0 {
            return Err(Error::InvalidDiscriminant(d));
        }
        let two_a = BigInt::from(2 * form.a);
        let re = Ball::from_rational(&BigRational::new(BigInt::from(-form.b), two_a.clone()), prec);
        let im = Ball::from_i64(-d, prec).sqrt()?.div_int(&two_a);
        Ok(CmPoint { form, re, im })
    }

    pub fn discriminant(&self) -> i64 {
        self.form.discriminant()
    }

    /// Coefficients `(c, b, a)` of the minimal polynomial `a x^2 + b x + c`.
    pub fn minimal_polynomial(&self) -> [i64; 3] {
        [self.form.c, self.form.b, self.form.a]
    }

    /// `Re tau` exactly.
    pub fn real_part(&self) -> BigRational {
        BigRational::new(BigInt::from(-self.form.b), BigInt::from(2 * self.form.a))
    }

    /// `|tau|^2 = c/a` exactly.
    pub fn norm(&self) -> BigRational {
        BigRational::new(BigInt::from(self.form.c), BigInt::from(self.form.a))
    }

    /// Membership in the closed domain `|Re tau| <= 1/2`, `|tau| >= 1`. The
    /// exact coordinates decide; the ball enclosures must not contradict them.
    pub fn in_fundamental_domain(&self) -> bool {
        let half = BigRational::new(1.into(), 2.into());
        let one = BigRational::from_integer(1.into());
        let exact = self.real_part().abs() <= half && self.norm() >= one;
        let n2 = &self.re.sqr() + &self.im.sqr();
        let three_quarters = BigRational::new(3.into(), 4.into());
        let balls = self.re.abs_lower().to_rational() <= half
            && n2.upper().to_rational() >= one
            && self.im.sqr().upper().to_rational() >= three_quarters;
        exact && balls
    }

    pub fn naive_height(&self) -> NaiveHeight {
        NaiveHeight::of(&self.form)
    }
}

/// The multiplicative Weil height `sqrt(c)` of a reduced CM point, kept as
/// the integer `c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NaiveHeight {
    pub squared: i64,
}

impl NaiveHeight {
    pub fn of(f: &QuadForm) -> Self {
        NaiveHeight { squared: f.c }
    }

    pub fn ball(&self, prec: u32) -> Result<Ball> {
        Ball::from_i64(self.squared, prec).sqrt()
    }
}

/// CM points of discriminant `d`, one per reduced form.
pub fn cm_points(d: i64, prec: u32) -> Result<Vec<CmPoint>> {
    reduced_forms(d)?.into_iter().map(|f| CmPoint::new(f, prec)).collect()
}

/// Outcome of checking `3c <= |D|` over a range of discriminants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightBoundSummary {
    pub forms: u64,
    pub exceptions: u64,
    /// Largest `3c/|D|`, with the form attaining it.
    pub worst: Option<(i64, i64, QuadForm)>,
}

impl HeightBoundSummary {
    pub fn empty() -> Self {
        HeightBoundSummary { forms: 0, exceptions: 0, worst: None }
    }

    pub fn pass(&self) -> bool {
        self.exceptions == 0
    }

    pub fn worst_ratio(&self) -> Option<f64> {
        self.worst.map(|(n, d, _)| n as f64 / d as f64)
    }

    fn record(&mut self, f: QuadForm) {
        let (n, d) = (3 * f.c, -f.discriminant());
        let single = HeightBoundSummary { forms: 1, exceptions: (n > d) as u64, worst: Some((n, d, f)) };
        *self = std::mem::replace(self, HeightBoundSummary::empty()).merge(single);
    }

    /// Combine the summaries of two disjoint ranges.
    pub fn merge(mut self, o: Self) -> Self {
        self.forms += o.forms;
        self.exceptions += o.exceptions;
        if let Some((n, d, f)) = o.worst {
            match self.worst {
                Some(w) if (w.0 as i128) * (d as i128) > (n as i128) * (w.1 as i128) => {}
                Some(w) if (w.0 as i128) * (d as i128) == (n as i128) * (w.1 as i128) && (w.1, w.2) <= (d, f) => {}
                _ => self.worst = Some((n, d, f)),
            }
        }
        self
    }
}

/// Visit every primitive reduced form with `lo <= |D| <= hi`, enumerated by `(a, b, c)`.
pub fn for_each_form_in_range<F: FnMut(QuadForm)>(lo: u64, hi: u64, mut visit: F) {
    let hi = hi as i64;
    let mut a = 1i64;
    while 3 * a * a <= hi {
        for b in -a + 1..=a {
            let mut c = a;
            loop {
                let n = 4 * a * c - b * b;
                if n > hi {
                    break;
                }
                let f = QuadForm::new(a, b, c);
                if n as u64 >= lo && f.is_reduced() && f.is_primitive() {
                    visit(f);
                }
                c += 1;
            }
        }
        a += 1;
    }
}

pub fn forms_in_range(lo: u64, hi: u64) -> Vec<QuadForm> {
    let mut out = Vec::new();
    for_each_form_in_range(lo, hi, |f| out.push(f));
    out
}

/// Check `H(tau)^2 = c <= |D|/3` for every reduced form with `lo <= |D| <= hi`.
pub fn height_bound_check(lo: u64, hi: u64) -> HeightBoundSummary {
    let mut s = HeightBoundSummary::empty();
    for_each_form_in_range(lo, hi, |f| s.record(f));
    s
}

fn totients(n: usize) -> Vec<u64> {
    let mut phi: Vec<u64> = (0..=n as u64).collect();
    for p in 2..=n {
        if phi[p] == p as u64 {
            for m in (p..=n).step_by(p) {
                phi[m] -= phi[m] / p as u64;
            }
        }
    }
    phi
}

/// Number of reduced primitive forms `(a, b, c)` of any negative discriminant
/// with `c <= x^2`, that is CM points of naive height at most `x`.
///
/// For fixed `a < c` the admissible `b` run over `(-a, a]`, and exactly
/// `2a phi(g)/g` of them are prime to `g = gcd(a, c)`; for `a = c` they run
/// over `[0, a]`, giving `phi(a)` except at `a = 1`.
pub fn census(x: u64) -> Result<u64> {
    if x == 0 {
        return Err(Error::DegenerateInput("census needs X >= 1".into()));
    }
    let cmax = x
        .checked_mul(x)
        .filter(|&c| c <= 1 << 24)
        .ok_or_else(|| Error::Unsupported(format!("census bound X = {x} is too large")))?;
    let phi = totients(cmax as usize);
    let mut total = 1u64;
    for c in 1..=cmax {
        total += phi[c as usize];
        for a in 1..c {
            let g = a.gcd(&c);
            total += 2 * a / g * phi[g as usize];
        }
    }
    Ok(total)
}

/// Direct enumeration of the forms counted by [`census`].
pub fn census_brute_force(x: u64) -> u64 {
    let cmax = (x * x) as i64;
    let mut n = 0;
    for c in 1..=cmax {
        for a in 1..=c {
            for b in -a..=a {
                let f = QuadForm::new(a, b, c);
                if f.is_reduced() && f.is_primitive() {
                    n += 1;
                }
            }
        }
    }
    n
}

/// Slope of `log N(X)` against `log X`.
pub fn growth_fit(xs: &[u64]) -> Result<LinearFit> {
    let pts = xs.iter().map(|&x| Ok((x as f64, census(x)? as f64))).collect::<Result<Vec<_>>>()?;
    log_log_fit(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms_and_heights() {
        let f23 = reduced_forms(-23).unwrap();
        assert_eq!(f23, vec![QuadForm::new(1, 1, 6), QuadForm::new(2, -1, 3), QuadForm::new(2, 1, 3)]);
        let p = CmPoint::new(QuadForm::new(1, 1, 41), 128).unwrap();
        assert!(p.in_fundamental_domain());
        assert_eq!(p.naive_height().squared, 41);
        let h = p.naive_height().ball(128).unwrap().to_f64();
        assert!((h - 41f64.sqrt()).abs() < 1e-14);
        assert!(matches!(reduced_forms(-5), Err(Error::InvalidDiscriminant(-5))));
    }

    #[test]
    fn census_matches_enumeration() {
        for x in 1..=6 {
            assert_eq!(census(x).unwrap(), census_brute_force(x), "X = {x}");
        }
        assert_eq!(census(1).unwrap(), 2);
        assert_eq!(totients(12)[1..], [1u64, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]);
    }

    #[test]
    fn bound_summary() {
        let s = height_bound_check(3, 2000);
        assert!(s.pass());
        assert_eq!(s.worst_ratio(), Some(1.0));
        let split = height_bound_check(3, 999).merge(height_bound_check(1000, 2000));
        assert_eq!(split, s);
    }
}
