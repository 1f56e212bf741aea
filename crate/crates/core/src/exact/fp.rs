use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::arith::{inv_mod, is_prime_u64, mul_mod};
use super::poly::Poly;
use crate::error::{Error, Result};

/// Polynomial over the prime field F_p, coefficients ascending.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FpPoly {
    p: u64,
    c: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for v in c.iter_mut() {
            *v %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { p, c }
    }

    pub fn from_int(f: &Poly<BigInt>, p: u64) -> Self {
        let pb = BigInt::from(p);
        let c = f
            .coeffs()
            .iter()
            .map(|a| {
                let r = ((a % &pb) + &pb) % &pb;
                r.to_u64().unwrap()
            })
            .collect();
        Self::new(p, c)
    }

    /// Lift to an integer polynomial with coefficients in `[0, p)`.
    pub fn to_int(&self) -> Poly<BigInt> {
        Poly::new(self.c.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn zero(p: u64) -> Self {
        FpPoly { p, c: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        Self::new(p, vec![1])
    }

    pub fn x(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lead(&self) -> u64 {
        self.c.last().copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn eval(&self, x: u64) -> u64 {
        let mut acc = 0;
        for &v in self.c.iter().rev() {
            acc = (mul_mod(acc, x, self.p) + v) % self.p;
        }
        acc
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.lead(), self.p).unwrap();
        self.scale(inv)
    }

    pub fn scale(&self, s: u64) -> Self {
        Self::new(self.p, self.c.iter().map(|&v| mul_mod(v, s, self.p)).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| {
                let a = self.c.get(i).copied().unwrap_or(0);
                let b = o.c.get(i).copied().unwrap_or(0);
                (a + b) % self.p
            })
            .collect();
        Self::new(self.p, c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| {
                let a = self.c.get(i).copied().unwrap_or(0);
                let b = o.c.get(i).copied().unwrap_or(0);
                (a + self.p - b) % self.p
            })
            .collect();
        Self::new(self.p, c)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p);
        }
        let mut acc = vec![0u128; self.c.len() + o.c.len() - 1];
        let p = self.p as u128;
        for (i, &a) in self.c.iter().enumerate() {
            for (j, &b) in o.c.iter().enumerate() {
                acc[i + j] = (acc[i + j] + a as u128 * b as u128) % p;
            }
        }
        Self::new(self.p, acc.into_iter().map(|v| v as u64).collect())
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let p = self.p;
        if self.c.len() < d.c.len() {
            return (Self::zero(p), self.clone());
        }
        let inv = inv_mod(d.lead(), p).unwrap();
        let mut r = self.c.clone();
        let dd = d.degree();
        let mut q = vec![0u64; r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = mul_mod(r[k + dd], inv, p);
            if c != 0 {
                for (j, &dj) in d.c.iter().enumerate() {
                    r[k + j] = (r[k + j] + p - mul_mod(c, dj, p)) % p;
                }
            }
            q[k] = c;
        }
        (Self::new(p, q), Self::new(p, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &v)| mul_mod(v, i as u64 % self.p, self.p))
            .collect();
        Self::new(self.p, c)
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, e: &BigUint, m: &Self) -> Self {
        let mut acc = Self::one(self.p).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            acc = acc.mul(&acc).rem(m);
            if e.bit(i) {
                acc = acc.mul(&base).rem(m);
            }
        }
        acc
    }

    fn pow_mod_u64(&self, e: u64, m: &Self) -> Self {
        self.pow_mod(&BigUint::from(e), m)
    }

    /// Coefficients of `self(x)^(1/p)` when the derivative vanishes.
    fn pth_root(&self) -> Self {
        let p = self.p as usize;
        let c = self.c.iter().step_by(p).copied().collect();
        Self::new(self.p, c)
    }

    pub fn is_irreducible(&self) -> bool {
        let f = factor_fp(self, 0);
        f.len() == 1 && f[0].1 == 1
    }
}

/// Squarefree decomposition of a monic polynomial: `(g_i, i)` with f = Π g_i^i.
pub fn squarefree_decomposition(f: &FpPoly) -> Vec<(FpPoly, u32)> {
    let p = f.p;
    let mut out = Vec::new();
    let f = f.monic();
    if f.degree() == 0 {
        return out;
    }
    let d = f.derivative();
    if d.is_zero() {
        for (g, e) in squarefree_decomposition(&f.pth_root()) {
            out.push((g, e * p as u32));
        }
        return out;
    }
    let mut c = f.gcd(&d);
    let mut w = f.div_rem(&c).0;
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = w.div_rem(&y).0;
        if z.degree() > 0 {
            out.push((z, i));
        }
        i += 1;
        w = y;
        c = c.div_rem(&w).0;
    }
    if c.degree() > 0 {
        for (g, e) in squarefree_decomposition(&c.pth_root()) {
            out.push((g, e * p as u32));
        }
    }
    out
}

/// Distinct-degree factorization of a squarefree monic polynomial.
pub fn distinct_degree(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.p;
    let mut out = Vec::new();
    let mut rest = f.monic();
    let x = FpPoly::x(p);
    let mut h = x.clone();
    let mut d = 0;
    while rest.degree() >= 2 * (d + 1) {
        d += 1;
        h = h.pow_mod_u64(p, &rest);
        let g = h.sub(&x).gcd(&rest);
        if !g.is_one() {
            rest = rest.div_rem(&g).0;
            h = h.rem(&rest);
            out.push((g, d));
        }
    }
    if rest.degree() > 0 {
        let deg = rest.degree();
        out.push((rest, deg));
    }
    out
}

/// Equal-degree splitting of a squarefree monic product of degree-`d` irreducibles.
pub fn equal_degree(f: &FpPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    let p = f.p;
    if f.degree() == d {
        return vec![f.monic()];
    }
    let n = f.degree();
    let exp = if p == 2 {
        BigUint::zero()
    } else {
        (BigUint::from(p).pow(d as u32) - BigUint::one()) >> 1
    };
    loop {
        let a = FpPoly::new(p, (0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.degree() == 0 {
            continue;
        }
        let t = if p == 2 {
            // trace map a + a^2 + ... + a^(2^(k-1)), k = d
            let mut acc = a.rem(f);
            let mut cur = acc.clone();
            for _ in 1..d {
                cur = cur.mul(&cur).rem(f);
                acc = acc.add(&cur);
            }
            acc
        } else {
            a.pow_mod(&exp, f).sub(&FpPoly::one(p))
        };
        let g = t.gcd(f);
        if g.degree() > 0 && g.degree() < n {
            let h = f.div_rem(&g).0;
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&h, d, rng));
            return out;
        }
    }
}

/// Complete factorization of a nonzero polynomial over F_p into monic irreducibles.
pub fn factor_fp(f: &FpPoly, seed: u64) -> Vec<(FpPoly, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ f.p);
    let mut out = Vec::new();
    for (g, e) in squarefree_decomposition(f) {
        for (h, d) in distinct_degree(&g) {
            for q in equal_degree(&h, d, &mut rng) {
                out.push((q, e));
            }
        }
    }
    out.sort_by(|a, b| (a.0.degree(), &a.0.c).cmp(&(b.0.degree(), &b.0.c)));
    // merge repeated factors coming from different squarefree layers
    let mut merged: Vec<(FpPoly, u32)> = Vec::new();
    for (g, e) in out {
        match merged.last_mut() {
            Some((h, k)) if *h == g => *k += e,
            _ => merged.push((g, e)),
        }
    }
    merged
}

/// Factor an integer polynomial modulo a prime.
pub fn factor_mod_p(f: &Poly<BigInt>, p: u64) -> Result<Vec<(FpPoly, u32)>> {
    factor_mod_p_seeded(f, p, 0)
}

pub fn factor_mod_p_seeded(f: &Poly<BigInt>, p: u64, seed: u64) -> Result<Vec<(FpPoly, u32)>> {
    if !is_prime_u64(p) {
        return Err(Error::CompositeModulus(p));
    }
    let fp = FpPoly::from_int(f, p);
    if fp.is_zero() {
        return Err(Error::DegenerateInput(format!("polynomial vanishes mod {p}")));
    }
    Ok(factor_fp(&fp, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expand(fs: &[(FpPoly, u32)], p: u64) -> FpPoly {
        let mut acc = FpPoly::one(p);
        for (g, e) in fs {
            for _ in 0..*e {
                acc = acc.mul(g);
            }
        }
        acc
    }

    #[test]
    fn small_examples() {
        let f = Poly::from_i64(&[1, 0, 1]);
        let r = factor_mod_p(&f, 5).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|(g, e)| g.degree() == 1 && *e == 1));
        let r3 = factor_mod_p(&f, 3).unwrap();
        assert_eq!(r3.len(), 1);
        assert_eq!(r3[0].0.degree(), 2);
        let cyc = Poly::from_i64(&[1, 1, 1, 1, 1]);
        let r11 = factor_mod_p(&cyc, 11).unwrap();
        assert_eq!(r11.len(), 4);
        let roots: Vec<u64> = (0..11).filter(|&x| FpPoly::from_int(&cyc, 11).eval(x) == 0).collect();
        assert_eq!(roots.len(), 4);
        assert_eq!(factor_mod_p(&f, 9), Err(Error::CompositeModulus(9)));
    }

    #[test]
    fn repeated_and_char_two() {
        // (x+1)^4 (x^2+x+1) over F_2
        let base = FpPoly::new(2, vec![1, 1]);
        let q = FpPoly::new(2, vec![1, 1, 1]);
        let f = base.mul(&base).mul(&base).mul(&base).mul(&q);
        let r = factor_fp(&f, 3);
        assert_eq!(r, vec![(base, 4), (q, 1)]);
        // x^8 - x over F_2 splits into all irreducibles of degree 1 and 3
        let g = FpPoly::new(2, vec![0, 1, 0, 0, 0, 0, 0, 0, 1]);
        let r = factor_fp(&g, 1);
        assert_eq!(r.iter().map(|(h, _)| h.degree()).collect::<Vec<_>>(), vec![1, 1, 3, 3]);
        assert_eq!(expand(&r, 2), g);
    }

    #[test]
    fn reexpansion_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in crate::exact::arith::primes_up_to(97) {
            for _ in 0..5 {
                let deg = rng.gen_range(1..9);
                let mut c: Vec<u64> = (0..deg).map(|_| rng.gen_range(0..p)).collect();
                c.push(1);
                let f = FpPoly::new(p, c);
                let r = factor_fp(&f, p);
                assert_eq!(expand(&r, p), f);
                assert!(r.iter().all(|(g, _)| {
                    let sub = factor_fp(g, 99);
                    sub.len() == 1 && sub[0].1 == 1
                }));
            }
        }
    }
}
