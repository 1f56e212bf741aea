//! Absolute number fields of small degree: maximal orders, embeddings and
//! exact element arithmetic.

mod cm;
pub mod order;
pub mod units;

use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use cm::{canonical_polynomial, CmData};

use crate::error::{Error, Result};
use crate::exact::poly::{charpoly, resultant_q};
use crate::exact::roots::{factor_over_z, isolate_roots};
use crate::exact::{Ball, ComplexBall, Poly, RootSet};
use crate::{IntMatrix, IntPolynomial, RatMatrix, RatPolynomial};

struct FieldData {
    poly: IntPolynomial,
    n: usize,
    basis_num: IntMatrix,
    basis_den: BigInt,
    to_int: RatMatrix,
    table: Vec<IntMatrix>,
    trace_form: IntMatrix,
    disc: BigInt,
    index: BigInt,
    signature: (usize, usize),
    roots: Mutex<Option<RootSet>>,
    cm: OnceLock<Option<CmData>>,
}

/// An absolute number field `Q[x]/(f)` together with its ring of integers.
#[derive(Clone)]
pub struct NumberField(Arc<FieldData>);

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.poly == other.0.poly
    }
}

impl Eq for NumberField {}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField({})", self.0.poly)
    }
}

fn rat(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

/// Build the field defined by a monic irreducible integer polynomial.
pub fn construct_field(f: &IntPolynomial) -> Result<NumberField> {
    if f.degree() == 0 || !f.is_monic() {
        return Err(Error::DegenerateInput("defining polynomial must be monic of positive degree".into()));
    }
    let n = f.degree();
    if n > 1 {
        if !f.is_squarefree() {
            return Err(Error::Reducible);
        }
        if factor_over_z(f)?.len() > 1 {
            return Err(Error::Reducible);
        }
    }
    let disc_f = if n == 1 { BigInt::one() } else { f.discriminant() };
    let (basis_num, basis_den) = order::maximal_order(f, &disc_f)?;
    let index = order::index_of(&basis_num, &basis_den);
    let disc = &disc_f / (&index * &index);
    let basis = basis_num.map(|v| BigRational::new(v.clone(), basis_den.clone()));
    let to_int = order::invert_rat(&basis);

    let fr = f.to_rational();
    let elems: Vec<RatPolynomial> = (0..n).map(|j| Poly::new(basis.col(j))).collect();
    let table: Vec<IntMatrix> = (0..n)
        .map(|i| {
            let mut m = IntMatrix::zeros(n, n);
            for j in 0..n {
                let prod = order::reduce_mod(&(&elems[i] * &elems[j]), &fr);
                let v: Vec<BigRational> = (0..n).map(|k| prod.coeff(k)).collect();
                let c = to_int.mul_vec(&v);
                for k in 0..n {
                    m[(k, j)] = c[k].to_integer();
                }
            }
            m
        })
        .collect();
    let traces: Vec<BigInt> = table.iter().map(trace_of).collect();
    let mut trace_form = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let col = table[i].col(j);
            trace_form[(i, j)] = col.iter().zip(&traces).map(|(a, t)| a * t).sum();
        }
    }
    debug_assert_eq!(trace_form.det(), disc);
    let r1 = if n == 1 { 1 } else { f.count_real_roots() };
    Ok(NumberField(Arc::new(FieldData {
        poly: f.clone(),
        n,
        basis_num,
        basis_den,
        to_int,
        table,
        trace_form,
        disc,
        index,
        signature: (r1, (n - r1) / 2),
        roots: Mutex::new(None),
        cm: OnceLock::new(),
    })))
}

fn trace_of(m: &IntMatrix) -> BigInt {
    (0..m.rows()).map(|i| m[(i, i)].clone()).sum()
}

/// Root enclosures of the generator under every complex embedding.
#[derive(Clone, Debug)]
pub struct EmbeddingSet {
    pub images: Vec<ComplexBall>,
    /// `pairing[i]` is the conjugate embedding of `i`.
    pub pairing: Vec<usize>,
    pub precision: u32,
}

impl EmbeddingSet {
    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }
}

pub fn complex_embeddings(k: &NumberField, precision: u32) -> Result<EmbeddingSet> {
    let rs = k.roots(precision)?;
    Ok(EmbeddingSet { images: rs.roots, pairing: rs.conj, precision: rs.precision })
}

impl NumberField {
    pub fn poly(&self) -> &IntPolynomial {
        &self.0.poly
    }

    pub fn degree(&self) -> usize {
        self.0.n
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.0.disc
    }

    pub fn signature(&self) -> (usize, usize) {
        self.0.signature
    }

    /// Index of the equation order in the maximal order.
    pub fn index(&self) -> &BigInt {
        &self.0.index
    }

    /// Integral basis as the columns of `num / den` over the power basis.
    pub fn basis_matrix(&self) -> (&IntMatrix, &BigInt) {
        (&self.0.basis_num, &self.0.basis_den)
    }

    pub fn integral_basis(&self) -> Vec<RatPolynomial> {
        let d = &self.0.basis_den;
        (0..self.0.n)
            .map(|j| Poly::new(self.0.basis_num.col(j).iter().map(|v| BigRational::new(v.clone(), d.clone())).collect()))
            .collect()
    }

    pub fn trace_form(&self) -> &IntMatrix {
        &self.0.trace_form
    }

    /// Matrix of multiplication by the `i`-th basis element.
    pub fn basis_mul_matrix(&self, i: usize) -> &IntMatrix {
        &self.0.table[i]
    }

    pub fn mul_table(&self) -> &[IntMatrix] {
        &self.0.table
    }

    pub fn is_totally_imaginary(&self) -> bool {
        self.0.signature.0 == 0
    }

    pub fn one_coords(&self) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.0.n];
        v[0] = BigInt::one();
        v
    }

    /// Integral-basis coordinates of an element given over the power basis.
    pub fn from_power(&self, c: &[BigRational]) -> Vec<BigRational> {
        let mut v = c.to_vec();
        v.resize(self.0.n, BigRational::zero());
        self.0.to_int.mul_vec(&v)
    }

    pub fn to_power(&self, c: &[BigRational]) -> Vec<BigRational> {
        let b = self.0.basis_num.map(rat);
        let d = rat(&self.0.basis_den);
        b.mul_vec(c).into_iter().map(|v| v / &d).collect()
    }

    pub fn mul_int(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let n = self.0.n;
        let mut out = vec![BigInt::zero(); n];
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            let col = self.0.table[i].mul_vec(b);
            for k in 0..n {
                out[k] += &a[i] * &col[k];
            }
        }
        out
    }

    pub fn mul_rat(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let n = self.0.n;
        let mut out = vec![BigRational::zero(); n];
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if b[j].is_zero() {
                    continue;
                }
                let ab = &a[i] * &b[j];
                for k in 0..n {
                    let t = &self.0.table[i][(k, j)];
                    if !t.is_zero() {
                        out[k] += &ab * rat(t);
                    }
                }
            }
        }
        out
    }

    /// Matrix of multiplication by an integral element.
    pub fn mul_matrix_int(&self, a: &[BigInt]) -> IntMatrix {
        let n = self.0.n;
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            for r in 0..n {
                for c in 0..n {
                    let v = &m[(r, c)] + &a[i] * &self.0.table[i][(r, c)];
                    m[(r, c)] = v;
                }
            }
        }
        m
    }

    pub fn mul_matrix(&self, a: &[BigRational]) -> RatMatrix {
        let n = self.0.n;
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            for r in 0..n {
                for c in 0..n {
                    let v = &m[(r, c)] + &a[i] * rat(&self.0.table[i][(r, c)]);
                    m[(r, c)] = v;
                }
            }
        }
        m
    }

    /// Value of an integer polynomial at an integral element.
    pub fn eval_int_poly(&self, f: &IntPolynomial, x: &[BigInt]) -> Vec<BigInt> {
        let mut acc = vec![BigInt::zero(); self.0.n];
        for c in f.coeffs().iter().rev() {
            acc = self.mul_int(&acc, x);
            acc[0] += c;
        }
        acc
    }

    pub fn norm_int(&self, a: &[BigInt]) -> BigInt {
        self.mul_matrix_int(a).det()
    }

    pub fn trace_int(&self, a: &[BigInt]) -> BigInt {
        trace_of(&self.mul_matrix_int(a))
    }

    /// Inverse of a nonzero element in integral coordinates.
    pub fn inv_rat(&self, a: &[BigRational]) -> Result<Vec<BigRational>> {
        if a.iter().all(|c| c.is_zero()) {
            return Err(Error::DegenerateInput("inverse of zero".into()));
        }
        let m = self.mul_matrix(a);
        let inv = order::invert_rat(&m);
        let mut e = vec![BigRational::zero(); self.0.n];
        e[0] = BigRational::one();
        Ok(inv.mul_vec(&e))
    }

    /// Cached root isolation of the defining polynomial.
    pub fn roots(&self, precision: u32) -> Result<RootSet> {
        let mut guard = self.0.roots.lock().unwrap();
        if let Some(rs) = guard.as_ref() {
            if rs.precision >= precision {
                return Ok(rs.clone());
            }
        }
        let rs = if self.0.n == 1 {
            let r = -self.0.poly.coeff(0);
            RootSet { roots: vec![ComplexBall::from_real(Ball::from_int(&r, precision))], conj: vec![0], precision }
        } else {
            isolate_roots(&self.0.poly, precision)?
        };
        *guard = Some(rs.clone());
        Ok(rs)
    }

    /// Image of an element (integral coordinates) under embedding `i`.
    pub fn embed(&self, a: &[BigRational], i: usize, precision: u32) -> Result<ComplexBall> {
        let rs = self.roots(precision)?;
        let pc = self.to_power(a);
        let z = &rs.roots[i];
        let p = z.prec().max(precision);
        let mut acc = ComplexBall::zero(p);
        for c in pc.iter().rev() {
            acc = &(&acc * z) + &ComplexBall::from_real(Ball::from_rational(c, p));
        }
        Ok(acc)
    }

    pub fn embed_int(&self, a: &[BigInt], i: usize, precision: u32) -> Result<ComplexBall> {
        self.embed(&a.iter().map(rat).collect::<Vec<_>>(), i, precision)
    }

    /// Integral coordinates of the element whose images under the embeddings
    /// (in root order) are `values`.
    ///
    /// `Ok(None)` means the values certainly do not come from an algebraic
    /// integer; `PrecisionExhausted` means the balls are too wide to decide.
    pub fn recover_integral(&self, values: &[ComplexBall], precision: u32) -> Result<Option<Vec<BigInt>>> {
        let n = self.0.n;
        if values.len() != n {
            return Err(Error::DegenerateInput("one value per embedding expected".into()));
        }
        let prec = values.iter().map(ComplexBall::prec).max().unwrap_or(precision).max(precision);
        let tinv = order::invert_rat(&self.0.trace_form.map(rat));
        let mut t = Vec::with_capacity(n);
        for i in 0..n {
            let mut e = vec![BigInt::zero(); n];
            e[i] = BigInt::one();
            let mut acc = ComplexBall::zero(prec);
            for (s, v) in values.iter().enumerate() {
                let w = self.embed_int(&e, s, prec)?;
                acc = &acc + &(&w * v);
            }
            if !acc.im.contains_zero() {
                return Ok(None);
            }
            t.push(acc.re);
        }
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            let mut acc = Ball::zero(prec);
            for (i, ti) in t.iter().enumerate() {
                let c = &tinv[(j, i)];
                if c.is_zero() {
                    continue;
                }
                acc = &acc + &(ti * &Ball::from_rational(c, prec));
            }
            if acc.rad_f64() > 0.25 {
                return Err(Error::PrecisionExhausted(prec as u64));
            }
            match acc.unique_integer() {
                Some(v) => out.push(v),
                None if acc.lower().floor() == acc.upper().floor() => return Ok(None),
                None => return Err(Error::PrecisionExhausted(prec as u64)),
            }
        }
        Ok(Some(out))
    }

    /// CM structure, computed on first use.
    pub fn cm(&self) -> Option<&CmData> {
        self.0.cm.get_or_init(|| cm::detect(self)).as_ref()
    }

    pub fn is_cm(&self) -> bool {
        self.cm().is_some()
    }

    /// Generator `x` of the power basis as an element.
    pub fn generator(&self) -> FieldElement {
        let mut c = vec![BigRational::zero(); self.0.n];
        if self.0.n > 1 {
            c[1] = BigRational::one();
        } else {
            c[0] = -rat(&self.0.poly.coeff(0));
        }
        FieldElement::from_power(self, &c)
    }

    pub fn element(&self, coords: Vec<BigRational>) -> FieldElement {
        FieldElement::new(self, coords)
    }

    pub fn element_int(&self, coords: &[BigInt]) -> FieldElement {
        FieldElement::new(self, coords.iter().map(rat).collect())
    }
}

/// `detect_cm` in free-function form.
pub fn detect_cm(k: &NumberField) -> Option<CmData> {
    k.cm().cloned()
}

/// An element of a number field in integral-basis coordinates.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: NumberField,
    coords: Vec<BigRational>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.coords.iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", c.join(", "))
    }
}

impl FieldElement {
    pub fn new(field: &NumberField, coords: Vec<BigRational>) -> Self {
        assert_eq!(coords.len(), field.degree(), "coordinate length must equal the degree");
        FieldElement { field: field.clone(), coords }
    }

    pub fn from_power(field: &NumberField, c: &[BigRational]) -> Self {
        FieldElement::new(field, field.from_power(c))
    }

    pub fn from_int(field: &NumberField, n: i64) -> Self {
        let mut c = vec![BigRational::zero(); field.degree()];
        c[0] = BigRational::from_integer(n.into());
        FieldElement::new(field, c)
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }

    pub fn integral_coords(&self) -> Option<Vec<BigInt>> {
        self.is_integral().then(|| self.coords.iter().map(|c| c.to_integer()).collect())
    }

    pub fn power_coords(&self) -> Vec<BigRational> {
        self.field.to_power(&self.coords)
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.field != o.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let c = self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect();
        Ok(FieldElement::new(&self.field, c))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let c = self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect();
        Ok(FieldElement::new(&self.field, c))
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(FieldElement::new(&self.field, self.field.mul_rat(&self.coords, &o.coords)))
    }

    pub fn neg(&self) -> Self {
        FieldElement::new(&self.field, self.coords.iter().map(|c| -c).collect())
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(FieldElement::new(&self.field, self.field.inv_rat(&self.coords)?))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = FieldElement::from_int(&self.field, 1);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b).unwrap();
            }
            b = b.mul(&b).unwrap();
            e >>= 1;
        }
        acc
    }

    /// Exact norm as the resultant of the defining polynomial with the
    /// power-basis representative.
    pub fn norm(&self) -> BigRational {
        if self.field.degree() == 1 {
            return self.power_coords()[0].clone();
        }
        let a = Poly::new(self.power_coords());
        resultant_q(&self.field.poly().to_rational(), &a)
    }

    pub fn trace(&self) -> BigRational {
        let m = self.field.mul_matrix(&self.coords);
        (0..m.rows()).map(|i| m[(i, i)].clone()).sum()
    }

    pub fn charpoly(&self) -> RatPolynomial {
        charpoly(&self.field.mul_matrix(&self.coords))
    }

    /// Minimal polynomial over Q (monic).
    pub fn minpoly(&self) -> RatPolynomial {
        let cp = self.charpoly();
        let g = cp.gcd(&cp.derivative());
        cp.div_rem(&g).0.monic()
    }

    /// Image under complex conjugation; `None` if the field is not CM.
    pub fn conj(&self) -> Option<Self> {
        let cm = self.field.cm()?;
        let m = cm.conjugation.map(rat);
        Some(FieldElement::new(&self.field, m.mul_vec(&self.coords)))
    }

    pub fn embed(&self, i: usize, precision: u32) -> Result<ComplexBall> {
        self.field.embed(&self.coords, i, precision)
    }
}

/// `(norm, trace, minimal polynomial)` of an element.
pub fn element_norm_trace(a: &FieldElement) -> (BigRational, BigRational, RatPolynomial) {
    (a.norm(), a.trace(), a.minpoly())
}

/// Quadratic field of fundamental discriminant `d`, defined by its standard
/// generator `(d + sqrt d)/2`-shifted polynomial.
pub fn quadratic_field(d: i64) -> Result<NumberField> {
    if !crate::exact::arith::is_fundamental_discriminant(d) {
        return Err(Error::InvalidDiscriminant(d));
    }
    construct_field(&quadratic_poly(d))
}

/// `x^2 - x + (1-d)/4` for `d ≡ 1 mod 4`, otherwise `x^2 - d/4`.
pub fn quadratic_poly(d: i64) -> IntPolynomial {
    if d.rem_euclid(4) == 1 {
        Poly::from_i64(&[(1 - d) / 4, -1, 1])
    } else {
        Poly::from_i64(&[-d / 4, 0, 1])
    }
}

pub fn rational_field() -> NumberField {
    construct_field(&Poly::from_i64(&[0, 1])).expect("Q is a field")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn gaussian() {
        let k = construct_field(&Poly::from_i64(&[1, 0, 1])).unwrap();
        assert_eq!(k.discriminant(), &BigInt::from(-4));
        assert_eq!(k.signature(), (0, 1));
        let a = FieldElement::from_power(&k, &[q(2), q(1)]);
        assert_eq!(a.norm(), q(5));
        assert_eq!(a.trace(), q(4));
        assert_eq!(a.minpoly(), Poly::new(vec![q(5), q(-4), q(1)]));
    }

    #[test]
    fn sqrt5_basis() {
        let k = construct_field(&Poly::from_i64(&[-5, 0, 1])).unwrap();
        assert_eq!(k.discriminant(), &BigInt::from(5));
        let b = k.integral_basis();
        assert_eq!(b[1], Poly::new(vec![BigRational::new(1.into(), 2.into()), BigRational::new(1.into(), 2.into())]));
        assert_eq!(k.trace_form().det(), BigInt::from(5));
    }

    #[test]
    fn cyclotomic5() {
        let k = construct_field(&Poly::from_i64(&[1, 1, 1, 1, 1])).unwrap();
        assert_eq!(k.discriminant(), &BigInt::from(125));
        assert_eq!(k.signature(), (0, 2));
        let z = k.generator();
        assert_eq!(z.norm(), q(1));
        assert_eq!(z.trace(), q(-1));
        assert_eq!(z.pow(5), FieldElement::from_int(&k, 1));
        let e = complex_embeddings(&k, 64).unwrap();
        assert_eq!(e.len(), 4);
        assert!(e.pairing.iter().enumerate().all(|(i, &j)| j != i && e.pairing[j] == i));
    }

    #[test]
    fn reducible_rejected() {
        assert!(matches!(construct_field(&Poly::from_i64(&[-1, 0, 1])), Err(Error::Reducible)));
        assert!(matches!(construct_field(&Poly::from_i64(&[4, 0, 5, 0, 1])), Err(Error::Reducible)));
    }
}
