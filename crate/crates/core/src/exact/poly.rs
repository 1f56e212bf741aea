use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::matrix::Matrix;

/// Dense univariate polynomial, coefficients in ascending order of degree.
///
/// The coefficient vector never carries trailing zeros; the zero polynomial is
/// the empty vector.
#[derive(Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

fn trim<T: Zero>(v: &mut Vec<T>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

impl<T: Clone + Zero> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        trim(&mut coeffs);
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn lead(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn map<U: Clone + Zero, F: Fn(&T) -> U>(&self, f: F) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

impl<T: Clone + Zero + One + PartialEq> Poly<T> {
    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn x() -> Self {
        Self::new(vec![T::zero(), T::one()])
    }

    pub fn monomial(c: T, k: usize) -> Self {
        let mut v = vec![T::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }
}

impl<T> Poly<T>
where
    T: Clone + Zero + One + PartialEq + Add<Output = T> + Mul<Output = T>,
{
    /// Horner evaluation.
    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    /// Evaluation at a value of another ring containing the coefficients.
    pub fn eval_with<U, F>(&self, x: &U, lift: F) -> U
    where
        U: Clone + Zero + Add<Output = U> + Mul<Output = U>,
        F: Fn(&T) -> U,
    {
        let mut acc = U::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + lift(c);
        }
        acc
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn derivative(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len().saturating_sub(1));
        let mut k = T::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                out.push(c.clone() * k.clone());
            }
            k = k + T::one();
        }
        Self::new(out)
    }

    /// `self(g(x))`.
    pub fn compose(&self, g: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * g) + &Self::constant(c.clone());
        }
        acc
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }
}

impl<T: Clone + Zero + Add<Output = T>> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(T::zero);
            let b = rhs.coeffs.get(i).cloned().unwrap_or_else(T::zero);
            v.push(a + b);
        }
        Poly::new(v)
    }
}

impl<T: Clone + Zero + Sub<Output = T>> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(T::zero);
            let b = rhs.coeffs.get(i).cloned().unwrap_or_else(T::zero);
            v.push(a - b);
        }
        Poly::new(v)
    }
}

impl<T: Clone + Zero + Neg<Output = T>> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<T: Clone + Zero + Add<Output = T> + Mul<Output = T>> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(v)
    }
}

impl<T: fmt::Display + Zero + One + PartialEq + Clone + Signed> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let unit = a.is_one();
            match k {
                0 => write!(f, "{a}")?,
                1 if unit => write!(f, "x")?,
                1 => write!(f, "{a}*x")?,
                _ if unit => write!(f, "x^{k}")?,
                _ => write!(f, "{a}*x^{k}")?,
            }
        }
        Ok(())
    }
}

impl<T: fmt::Display + Zero + One + PartialEq + Clone + Signed> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Operations over a field of coefficients.
impl Poly<BigRational> {
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.coeffs.clone();
        let dl = d.lead();
        let dd = d.degree();
        if r.len() < d.coeffs.len() {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &dl;
            if !c.is_zero() {
                for (j, dj) in d.coeffs.iter().enumerate() {
                    r[k + j] = &r[k + j] - &c * dj;
                }
            }
            q[k] = c;
        }
        (Self::new(q), Self::new(r))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead();
        self.map(|c| c / &l)
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Primitive integer polynomial with the same roots, positive leading coefficient.
    pub fn to_primitive_int(&self) -> Poly<BigInt> {
        if self.is_zero() {
            return Poly::zero();
        }
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ip = self.map(|c| (c * BigRational::from_integer(den.clone())).to_integer());
        let p = ip.primitive_part();
        if p.lead().is_negative() {
            -&p
        } else {
            p
        }
    }
}

/// Operations specific to integer coefficients.
impl Poly<BigInt> {
    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn to_rational(&self) -> Poly<BigRational> {
        self.map(|c| BigRational::from_integer(c.clone()))
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    pub fn primitive_part(&self) -> Self {
        let c = self.content();
        if c.is_zero() {
            return self.clone();
        }
        self.map(|a| a / &c)
    }

    /// Exact division; `None` if `d` does not divide `self` over Z.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.to_rational().div_rem(&d.to_rational());
        if !r.is_zero() || q.coeffs.iter().any(|c| !c.is_integer()) {
            return None;
        }
        Some(q.map(|c| c.to_integer()))
    }

    /// Resultant `Res(self, other)`.
    pub fn resultant(&self, other: &Self) -> BigInt {
        resultant_q(&self.to_rational(), &other.to_rational()).to_integer()
    }

    /// Discriminant with the usual sign and leading-coefficient normalisation.
    pub fn discriminant(&self) -> BigInt {
        let n = self.degree();
        if n == 0 {
            return BigInt::one();
        }
        let r = resultant_q(&self.to_rational(), &self.derivative().to_rational());
        let d = r / BigRational::from_integer(self.lead());
        let d = d.to_integer();
        if (n * (n - 1) / 2) % 2 == 1 {
            -d
        } else {
            d
        }
    }

    pub fn is_squarefree(&self) -> bool {
        let f = self.to_rational();
        f.gcd(&f.derivative()).degree() == 0
    }

    /// `self(-x)` up to sign, used to test symmetry of root sets.
    pub fn reflect(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    /// Sturm count of distinct real roots.
    pub fn count_real_roots(&self) -> usize {
        if self.degree() == 0 {
            return 0;
        }
        let f = self.to_rational();
        let mut seq = vec![f.clone(), f.derivative()];
        loop {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            if r.is_zero() {
                break;
            }
            seq.push(-&r);
        }
        let changes = |signs: Vec<i32>| {
            let s: Vec<i32> = signs.into_iter().filter(|&s| s != 0).collect();
            s.windows(2).filter(|w| w[0] != w[1]).count()
        };
        let sign = |c: &BigRational| {
            if c.is_positive() {
                1
            } else if c.is_negative() {
                -1
            } else {
                0
            }
        };
        let at_pos: Vec<i32> = seq.iter().map(|p| sign(&p.lead())).collect();
        let at_neg: Vec<i32> = seq
            .iter()
            .map(|p| {
                let s = sign(&p.lead());
                if p.degree() % 2 == 1 {
                    -s
                } else {
                    s
                }
            })
            .collect();
        changes(at_neg) - changes(at_pos)
    }
}

/// Resultant over Q by the Euclidean recurrence.
pub fn resultant_q(f: &Poly<BigRational>, g: &Poly<BigRational>) -> BigRational {
    if f.is_zero() || g.is_zero() {
        return BigRational::zero();
    }
    let (m, n) = (f.degree(), g.degree());
    if n == 0 {
        return pow_q(&g.lead(), m);
    }
    if m == 0 {
        return pow_q(&f.lead(), n);
    }
    let r = f.div_rem(g).1;
    if r.is_zero() {
        return BigRational::zero();
    }
    let sign = if (m * n) % 2 == 1 { -BigRational::one() } else { BigRational::one() };
    sign * pow_q(&g.lead(), m - r.degree()) * resultant_q(g, &r)
}

fn pow_q(x: &BigRational, e: usize) -> BigRational {
    num_traits::pow(x.clone(), e)
}

/// Characteristic polynomial `det(x I - m)` over Q (Faddeev-LeVerrier).
pub fn charpoly(m: &Matrix<BigRational>) -> Poly<BigRational> {
    let n = m.rows();
    assert!(m.is_square());
    let mut c = vec![BigRational::zero(); n + 1];
    c[n] = BigRational::one();
    let mut mk = Matrix::<BigRational>::zeros(n, n);
    let ident = Matrix::<BigRational>::identity(n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let prod = m * &mk;
        mk = &prod + &ident.map(|v| v * &c[n - k + 1]);
        let am = m * &mk;
        let tr = (0..n).fold(BigRational::zero(), |acc, i| acc + &am[(i, i)]);
        c[n - k] = -tr / BigRational::from_integer(BigInt::from(k));
    }
    Poly::new(c)
}

/// Characteristic polynomial of an integer matrix.
pub fn charpoly_int(m: &Matrix<BigInt>) -> Poly<BigInt> {
    charpoly(&m.map(|v| BigRational::from_integer(v.clone()))).map(|c| c.to_integer())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_display() {
        let f = Poly::from_i64(&[1, 0, 1]);
        let g = Poly::from_i64(&[-1, 1]);
        assert_eq!(&f * &g, Poly::from_i64(&[-1, 1, -1, 1]));
        assert_eq!(f.derivative(), Poly::from_i64(&[0, 2]));
        assert_eq!(format!("{}", Poly::from_i64(&[5, 0, -3, 0, 1])), "x^4 - 3*x^2 + 5");
        assert_eq!(f.compose(&g), Poly::from_i64(&[2, -2, 1]));
    }

    #[test]
    fn resultant_and_discriminant() {
        assert_eq!(Poly::from_i64(&[1, 0, 1]).discriminant(), BigInt::from(-4));
        assert_eq!(Poly::from_i64(&[1, 1, 1]).discriminant(), BigInt::from(-3));
        // x^3 + a x + b: -4a^3 - 27 b^2
        assert_eq!(Poly::from_i64(&[1, -1, 0, 1]).discriminant(), BigInt::from(4 - 27));
        assert_eq!(Poly::from_i64(&[5, 0, 5, 0, 1]).discriminant(), BigInt::from(2000));
        let f = Poly::from_i64(&[-2, 0, 1]);
        let g = Poly::from_i64(&[-3, 0, 1]);
        assert_eq!(f.resultant(&g), BigInt::from(1));
    }

    #[test]
    fn sturm_counts() {
        assert_eq!(Poly::from_i64(&[1, 0, 1]).count_real_roots(), 0);
        assert_eq!(Poly::from_i64(&[-2, 0, 1]).count_real_roots(), 2);
        assert_eq!(Poly::from_i64(&[-2, 0, 0, 1]).count_real_roots(), 1);
        assert_eq!(Poly::from_i64(&[0, -1, 0, 1]).count_real_roots(), 3);
    }

    #[test]
    fn charpoly_companion() {
        let m = Matrix::from_rows(vec![
            vec![BigInt::from(0), BigInt::from(-5)],
            vec![BigInt::from(1), BigInt::from(3)],
        ]);
        assert_eq!(charpoly_int(&m), Poly::from_i64(&[5, -3, 1]));
    }
}
