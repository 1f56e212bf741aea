//! Integral ideals in Hermite normal form over the integral basis, prime
//! decomposition and valuations.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::arith::{factor_u64, is_prime_u64};
use crate::exact::fp::{factor_fp, FpPoly};
use crate::field::order::{fp_kernel, lattice_from_kernel, pow_coords_mod};
use crate::field::NumberField;
use crate::IntMatrix;

/// An integral ideal, stored as the column HNF of a Z-basis.
#[derive(Clone, PartialEq, Eq)]
pub struct IntegralIdeal {
    field: NumberField,
    basis: IntMatrix,
    norm: BigInt,
}

impl fmt::Debug for IntegralIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ideal(N={}, {:?})", self.norm, self.basis)
    }
}

fn diag_product(h: &IntMatrix) -> BigInt {
    (0..h.rows()).map(|i| h[(i, i)].clone()).product()
}

impl IntegralIdeal {
    fn from_hnf(field: &NumberField, basis: IntMatrix) -> Self {
        let norm = diag_product(&basis);
        IntegralIdeal { field: field.clone(), basis, norm }
    }

    pub fn unit(k: &NumberField) -> Self {
        Self::from_hnf(k, IntMatrix::identity(k.degree()))
    }

    /// Ideal generated by `gens` together with the positive integer `m`, which must lie in it.
    pub fn from_generators_mod(k: &NumberField, gens: &[Vec<BigInt>], m: &BigInt) -> Self {
        let n = k.degree();
        let mut cols = Vec::with_capacity(n * (gens.len() + 1));
        for g in gens {
            for t in k.mul_table() {
                cols.push(t.mul_vec(g));
            }
        }
        for i in 0..n {
            let mut e = vec![BigInt::zero(); n];
            e[i] = m.clone();
            cols.push(e);
        }
        let modulus = num_traits::pow(m.abs(), n);
        let h = IntMatrix::from_cols(cols, n).hnf_modular(&modulus);
        Self::from_hnf(k, h)
    }

    /// Ideal generated by arbitrary integral elements (at least one nonzero).
    pub fn from_generators(k: &NumberField, gens: &[Vec<BigInt>]) -> Self {
        let mut m = BigInt::zero();
        for g in gens {
            if g.iter().any(|c| !c.is_zero()) {
                m = m.gcd(&k.norm_int(g));
            }
        }
        assert!(!m.is_zero(), "ideal generated by zero");
        Self::from_generators_mod(k, gens, &m)
    }

    pub fn principal(k: &NumberField, a: &[BigInt]) -> Self {
        let nm = k.norm_int(a).abs();
        assert!(!nm.is_zero(), "principal ideal of zero");
        let h = k.mul_matrix_int(a).hnf_modular(&nm);
        Self::from_hnf(k, h)
    }

    pub fn principal_int(k: &NumberField, m: &BigInt) -> Self {
        let n = k.degree();
        Self::from_hnf(k, IntMatrix::diagonal(&vec![m.abs(); n]))
    }

    /// Build from an arbitrary full-rank Z-basis, verifying closure.
    pub fn from_basis(k: &NumberField, b: &IntMatrix) -> Result<Self> {
        let h = b.hnf();
        let n = k.degree();
        if h.cols() < n || (0..n).any(|i| h[(i, h.cols() - n + i)].is_zero()) {
            return Err(Error::DegenerateInput("basis is not of full rank".into()));
        }
        let h = h.select_cols(&((h.cols() - n)..h.cols()).collect::<Vec<_>>());
        let id = Self::from_hnf(k, h);
        if !id.is_closed() {
            return Err(Error::DegenerateInput("lattice is not an ideal".into()));
        }
        Ok(id)
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn norm(&self) -> &BigInt {
        &self.norm
    }

    pub fn is_unit(&self) -> bool {
        self.norm.is_one()
    }

    /// Smallest positive integer in the ideal.
    pub fn min_integer(&self) -> &BigInt {
        &self.basis[(0, 0)]
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        let n = self.field.degree();
        let mut v = x.to_vec();
        for i in (0..n).rev() {
            let (q, r) = v[i].div_mod_floor(&self.basis[(i, i)]);
            if !r.is_zero() {
                return false;
            }
            if !q.is_zero() {
                for r in 0..=i {
                    let t = &v[r] - &q * &self.basis[(r, i)];
                    v[r] = t;
                }
            }
        }
        true
    }

    /// Reduce an integral element modulo the ideal to its canonical representative.
    pub fn reduce(&self, x: &[BigInt]) -> Vec<BigInt> {
        let n = self.field.degree();
        let mut v = x.to_vec();
        for i in (0..n).rev() {
            let q = v[i].div_floor(&self.basis[(i, i)]);
            if !q.is_zero() {
                for r in 0..=i {
                    let t = &v[r] - &q * &self.basis[(r, i)];
                    v[r] = t;
                }
            }
        }
        v
    }

    pub fn is_closed(&self) -> bool {
        let n = self.field.degree();
        (0..n).all(|j| {
            let c = self.basis.col(j);
            self.field.mul_table().iter().all(|t| self.contains(&t.mul_vec(&c)))
        })
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.field != o.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let n = self.field.degree();
        if self.is_unit() {
            return Ok(o.clone());
        }
        if o.is_unit() {
            return Ok(self.clone());
        }
        let mut cols = Vec::with_capacity(n * n);
        for i in 0..n {
            let a = self.basis.col(i);
            for j in 0..n {
                cols.push(self.field.mul_int(&a, &o.basis.col(j)));
            }
        }
        let m = &self.norm * &o.norm;
        let h = IntMatrix::from_cols(cols, n).hnf_modular(&m);
        Ok(Self::from_hnf(&self.field, h))
    }

    pub fn mul_element(&self, a: &[BigInt]) -> Self {
        let n = self.field.degree();
        let cols: Vec<Vec<BigInt>> = (0..n).map(|j| self.field.mul_int(a, &self.basis.col(j))).collect();
        let m = &self.norm * self.field.norm_int(a).abs();
        Self::from_hnf(&self.field, IntMatrix::from_cols(cols, n).hnf_modular(&m))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::unit(&self.field);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b).unwrap();
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b).unwrap();
            }
        }
        acc
    }

    /// Sum (gcd) of two ideals.
    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let m = self.norm.gcd(&o.norm);
        let h = self.basis.hcat(&o.basis).hnf_modular(&m);
        Ok(Self::from_hnf(&self.field, h))
    }

    /// `I / m` for an integer `m` dividing every element.
    pub fn div_int(&self, m: &BigInt) -> Option<Self> {
        let n = self.field.degree();
        if (0..n).any(|i| (0..n).any(|j| !self.basis[(i, j)].is_multiple_of(m))) {
            return None;
        }
        Some(Self::from_hnf(&self.field, self.basis.map(|v| v / m)))
    }

    /// Complex conjugate ideal; `None` unless the field is CM.
    pub fn conj(&self) -> Option<Self> {
        let cm = self.field.cm()?;
        let img = &cm.conjugation * &self.basis;
        Some(Self::from_hnf(&self.field, img.hnf_modular(&self.norm)))
    }

    /// Gram matrix of a positive-definite form restricted to the ideal lattice.
    pub fn gram(&self, g: &IntMatrix) -> IntMatrix {
        &(&self.basis.transpose() * g) * &self.basis
    }

    pub fn to_rational_basis(&self) -> crate::RatMatrix {
        self.basis.map(|v| BigRational::from_integer(v.clone()))
    }
}

/// A prime ideal with its local data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeIdeal {
    pub ideal: IntegralIdeal,
    pub p: u64,
    pub e: u32,
    pub f: u32,
    beta: Vec<BigInt>,
}

impl PrimeIdeal {
    pub fn norm(&self) -> BigInt {
        num_traits::pow(BigInt::from(self.p), self.f as usize)
    }

    pub fn norm_u64(&self) -> Option<u64> {
        self.p.checked_pow(self.f)
    }

    /// `v_P(x)` for a nonzero integral element.
    pub fn valuation_element(&self, x: &[BigInt]) -> u32 {
        assert!(x.iter().any(|c| !c.is_zero()), "valuation of zero");
        let k = self.ideal.field();
        let p = BigInt::from(self.p);
        let mut y = x.to_vec();
        let mut v = 0;
        loop {
            let z = k.mul_int(&y, &self.beta);
            if z.iter().all(|c| c.is_multiple_of(&p)) {
                y = z.into_iter().map(|c| c / &p).collect();
                v += 1;
            } else {
                return v;
            }
        }
    }

    pub fn valuation(&self, i: &IntegralIdeal) -> u32 {
        let n = i.field().degree();
        (0..n).map(|j| self.valuation_element(&i.basis().col(j))).min().unwrap()
    }
}

fn anti_uniformizer(k: &NumberField, pid: &IntegralIdeal, p: u64) -> Vec<BigInt> {
    let n = k.degree();
    let pb = BigInt::from(p);
    let mut rows = vec![vec![0u64; n]; n * n];
    for kk in 0..n {
        let gamma = pid.basis().col(kk);
        for (i, t) in k.mul_table().iter().enumerate() {
            let prod = t.mul_vec(&gamma);
            for l in 0..n {
                rows[kk * n + l][i] = prod[l].mod_floor(&pb).to_u64().unwrap();
            }
        }
    }
    let ker = fp_kernel(&rows, n, p);
    ker[0].iter().map(|&v| BigInt::from(v)).collect()
}

fn finish_prime(k: &NumberField, ideal: IntegralIdeal, p: u64, f: u32, e: Option<u32>) -> PrimeIdeal {
    let beta = anti_uniformizer(k, &ideal, p);
    let mut pr = PrimeIdeal { ideal, p, e: e.unwrap_or(0), f, beta };
    if e.is_none() {
        let mut pv = vec![BigInt::zero(); k.degree()];
        pv[0] = BigInt::from(p);
        pr.e = pr.valuation_element(&pv);
    }
    pr
}

/// Prime ideals above `p`, sorted by residue degree, ramification and basis.
pub fn primes_above(k: &NumberField, p: u64) -> Result<Vec<PrimeIdeal>> {
    if !is_prime_u64(p) {
        return Err(Error::CompositeModulus(p));
    }
    let n = k.degree();
    let pb = BigInt::from(p);
    let mut out = if n == 1 {
        let id = IntegralIdeal::principal_int(k, &pb);
        vec![finish_prime(k, id, p, 1, Some(1))]
    } else if !k.index().is_multiple_of(&pb) {
        let theta = k.generator().integral_coords().expect("generator is integral");
        let fp = FpPoly::from_int(k.poly(), p);
        factor_fp(&fp, p)
            .into_iter()
            .map(|(g, e)| {
                let gt = k.eval_int_poly(&g.to_int(), &theta);
                let id = IntegralIdeal::from_generators_mod(k, &[gt], &pb);
                finish_prime(k, id, p, g.degree() as u32, Some(e))
            })
            .collect()
    } else {
        split_radical(k, p)?
    };
    out.sort_by_key(|q| (q.f, q.e, q.ideal.basis().to_cols()));
    Ok(out)
}

/// Coordinates of `x mod J` on the positions where the HNF pivot equals `p`.
fn quotient_coords(j: &IntegralIdeal, x: &[BigInt], p: u64) -> Vec<u64> {
    let r = j.reduce(x);
    let pb = BigInt::from(p);
    (0..r.len())
        .filter(|&i| j.basis()[(i, i)] == pb)
        .map(|i| r[i].mod_floor(&pb).to_u64().unwrap())
        .collect()
}

/// Minimal polynomial over F_p of `x` acting on `O/J`.
fn minpoly_mod(k: &NumberField, j: &IntegralIdeal, x: &[BigInt], p: u64) -> FpPoly {
    let mut pows: Vec<Vec<u64>> = Vec::new();
    let mut cur = k.one_coords();
    loop {
        let c = quotient_coords(j, &cur, p);
        // solve sum a_i pows[i] = -c
        let m = pows.len();
        let dim = c.len();
        let mut rows = vec![vec![0u64; m + 1]; dim];
        for r in 0..dim {
            for (i, pw) in pows.iter().enumerate() {
                rows[r][i] = pw[r];
            }
            rows[r][m] = c[r];
        }
        let ker = fp_kernel(&rows, m + 1, p);
        if let Some(v) = ker.iter().find(|v| v[m] != 0) {
            let inv = crate::exact::arith::inv_mod(v[m], p).unwrap();
            let coeffs: Vec<u64> = v.iter().map(|&a| crate::exact::arith::mul_mod(a, inv, p)).collect();
            return FpPoly::new(p, coeffs);
        }
        pows.push(c);
        cur = k.mul_int(&cur, x);
        cur = j.reduce(&cur);
    }
}

fn split_radical(k: &NumberField, p: u64) -> Result<Vec<PrimeIdeal>> {
    let n = k.degree();
    let pb = BigInt::from(p);
    let mut q = p;
    while (q as usize) < n {
        q *= p;
    }
    let mut frob = vec![vec![0u64; n]; n];
    for i in 0..n {
        let mut e = vec![0u64; n];
        e[i] = 1;
        let img = pow_coords_mod(k.mul_table(), &e, q, p);
        for r in 0..n {
            frob[r][i] = img[r];
        }
    }
    let ker = fp_kernel(&frob, n, p);
    let rad = IntegralIdeal::from_hnf(k, lattice_from_kernel(&ker, n, p));
    let mut rng = ChaCha8Rng::seed_from_u64(p ^ 0x5eed);
    let mut pending = vec![rad];
    let mut done = Vec::new();
    let mut attempts = 0usize;
    while let Some(j) = pending.pop() {
        let dim = (0..n).filter(|&i| j.basis()[(i, i)] == pb).count();
        let mut split = false;
        for trial in 0..64 {
            attempts += 1;
            if attempts > 10_000 {
                return Err(Error::IndexDivisor(p));
            }
            let x: Vec<BigInt> = if trial + 1 < n {
                let mut e = vec![BigInt::zero(); n];
                e[trial + 1] = BigInt::one();
                e
            } else {
                (0..n).map(|_| BigInt::from(rng.gen_range(0..p))).collect()
            };
            let m = minpoly_mod(k, &j, &x, p);
            let fac = factor_fp(&m, p);
            if fac.len() > 1 {
                for (g, _) in fac {
                    let gx = j.reduce(&k.eval_int_poly(&g.to_int(), &x));
                    let mut gens: Vec<Vec<BigInt>> = j.basis().to_cols();
                    gens.push(gx);
                    pending.push(IntegralIdeal::from_generators_mod(k, &gens, &pb));
                }
                split = true;
                break;
            }
            if m.degree() == dim {
                done.push(finish_prime(k, j.clone(), p, dim as u32, None));
                split = true;
                break;
            }
        }
        if !split {
            return Err(Error::IndexDivisor(p));
        }
    }
    Ok(done)
}

/// Exact number of integral ideals of norm `n`.
pub fn count_ideals_of_norm(k: &NumberField, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::DegenerateInput("norm must be positive".into()));
    }
    let mut total = 1u64;
    for (p, a) in factor_u64(n) {
        let degs: Vec<u32> = primes_above(k, p)?.iter().map(|q| q.f).collect();
        let a = a as usize;
        let mut ways = vec![0u64; a + 1];
        ways[0] = 1;
        for f in degs {
            let f = f as usize;
            for s in f..=a {
                ways[s] += ways[s - f];
            }
        }
        total *= ways[a];
        if total == 0 {
            break;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Poly;
    use crate::field::construct_field;

    fn b(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn gaussian_primes() {
        let k = construct_field(&Poly::from_i64(&[1, 0, 1])).unwrap();
        let p5 = primes_above(&k, 5).unwrap();
        assert_eq!(p5.len(), 2);
        assert!(p5.iter().all(|q| q.norm() == BigInt::from(5) && q.e == 1));
        let p2 = primes_above(&k, 2).unwrap();
        assert_eq!((p2.len(), p2[0].e, p2[0].f), (1, 2, 1));
        let a = IntegralIdeal::principal(&k, &b(&[2, 1]));
        let c = IntegralIdeal::principal(&k, &b(&[2, -1]));
        assert_eq!(a.mul(&c).unwrap(), IntegralIdeal::principal_int(&k, &BigInt::from(5)));
        assert_eq!(count_ideals_of_norm(&k, 25).unwrap(), 3);
        assert_eq!(count_ideals_of_norm(&k, 3).unwrap(), 0);
    }

    #[test]
    fn valuations() {
        let k = construct_field(&Poly::from_i64(&[1, 0, 1])).unwrap();
        let p2 = &primes_above(&k, 2).unwrap()[0];
        assert_eq!(p2.valuation_element(&b(&[4, 0])), 4);
        assert_eq!(p2.valuation_element(&b(&[1, 1])), 1);
        let p5 = primes_above(&k, 5).unwrap();
        let v: Vec<u32> = p5.iter().map(|q| q.valuation_element(&b(&[2, 1]))).collect();
        assert_eq!(v.iter().sum::<u32>(), 1);
    }

    #[test]
    fn index_divisor_splitting() {
        // x^2 + 7 has index 2; 2 splits in Q(sqrt -7)
        let k = construct_field(&Poly::from_i64(&[7, 0, 1])).unwrap();
        assert_eq!(k.index(), &BigInt::from(2));
        let p = primes_above(&k, 2).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.iter().all(|q| q.f == 1 && q.e == 1));
        let k = construct_field(&Poly::from_i64(&[-5, 0, 1])).unwrap();
        let p = primes_above(&k, 2).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].f, 2);
        // quartic with a common index divisor is handled by radical splitting
        let k = construct_field(&Poly::from_i64(&[36, 0, 0, 0, 1])).unwrap();
        for q in [2u64, 3, 5, 7, 13] {
            let ps = primes_above(&k, q).unwrap();
            let s: u32 = ps.iter().map(|x| x.e * x.f).sum();
            assert_eq!(s, 4);
            let mut prod = IntegralIdeal::unit(&k);
            for x in &ps {
                prod = prod.mul(&x.ideal.pow(x.e as u64)).unwrap();
            }
            assert_eq!(prod, IntegralIdeal::principal_int(&k, &BigInt::from(q)));
        }
    }

    #[test]
    fn cyclotomic_splitting() {
        let k = construct_field(&Poly::from_i64(&[1, 1, 1, 1, 1])).unwrap();
        let p = primes_above(&k, 11).unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.iter().all(|q| q.f == 1 && q.e == 1));
        let p5 = primes_above(&k, 5).unwrap();
        assert_eq!((p5.len(), p5[0].e), (1, 4));
    }
}
