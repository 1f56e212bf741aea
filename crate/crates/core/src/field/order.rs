//! Maximal orders: Dedekind criterion, then Round-2 enlargement at bad primes.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::arith::{factor_integer, mul_mod};
use crate::exact::fp::{factor_fp, FpPoly};
use crate::exact::{Matrix, Poly};
use crate::{IntMatrix, IntPolynomial, RatMatrix, RatPolynomial};

const ROUND2_CAP: usize = 64;

/// Whether the equation order `Z[x]/(f)` is maximal at `p`.
pub fn dedekind_maximal(f: &IntPolynomial, p: u64) -> bool {
    let fp = FpPoly::from_int(f, p);
    let factors = factor_fp(&fp, 0);
    let g = factors.iter().fold(FpPoly::one(p), |acc, (q, _)| acc.mul(q));
    let h = fp.div_rem(&g).0;
    let gl = g.to_int();
    let hl = h.to_int();
    let diff = f - &(&gl * &hl);
    let pb = BigInt::from(p);
    let big_f = diff.map(|c| c / &pb);
    let ff = FpPoly::from_int(&big_f, p);
    let d = ff.gcd(&g).gcd(&h);
    d.degree() == 0 && !d.is_zero()
}

/// Kernel of an `m x n` matrix over F_p, as a list of basis vectors.
pub fn fp_kernel(a: &[Vec<u64>], ncols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut m: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|&v| v % p).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(r) = (row..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(row, r);
        let inv = crate::exact::arith::inv_mod(m[row][col], p).unwrap();
        for v in m[row].iter_mut() {
            *v = mul_mod(*v, inv, p);
        }
        for r2 in 0..m.len() {
            if r2 != row && m[r2][col] != 0 {
                let c = m[r2][col];
                for k in 0..ncols {
                    let sub = mul_mod(c, m[row][k], p);
                    m[r2][k] = (m[r2][k] + p - sub) % p;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u64; ncols];
            v[fc] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - m[r][fc]) % p;
            }
            v
        })
        .collect()
}

fn rat(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

/// Reduce a power-basis polynomial modulo `f`.
pub fn reduce_mod(a: &RatPolynomial, f: &RatPolynomial) -> RatPolynomial {
    if a.degree() < f.degree() {
        return a.clone();
    }
    a.div_rem(f).1
}

pub fn invert_rat(m: &RatMatrix) -> RatMatrix {
    let n = m.rows();
    let mut a = m.hcat(&Matrix::identity(n));
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[(r, col)].is_zero()).expect("singular matrix");
        a.swap_rows(piv, col);
        let inv = BigRational::one() / a[(col, col)].clone();
        for k in 0..2 * n {
            let v = &a[(col, k)] * &inv;
            a[(col, k)] = v;
        }
        for r in 0..n {
            if r != col && !a[(r, col)].is_zero() {
                let c = a[(r, col)].clone();
                for k in 0..2 * n {
                    let v = &a[(r, k)] - &c * &a[(col, k)];
                    a[(r, k)] = v;
                }
            }
        }
    }
    a.select_cols(&(n..2 * n).collect::<Vec<_>>())
}

/// Multiplication table of the order with basis columns `b` (power coordinates):
/// `table[i]` is the integer matrix of multiplication by `b_i`.
fn order_table(f: &RatPolynomial, b: &RatMatrix, binv: &RatMatrix) -> Vec<IntMatrix> {
    let n = b.rows();
    let elems: Vec<RatPolynomial> = (0..n).map(|j| Poly::new(b.col(j))).collect();
    (0..n)
        .map(|i| {
            let mut m = IntMatrix::zeros(n, n);
            for j in 0..n {
                let prod = reduce_mod(&(&elems[i] * &elems[j]), f);
                let v: Vec<BigRational> = (0..n).map(|k| prod.coeff(k)).collect();
                let c = binv.mul_vec(&v);
                for k in 0..n {
                    assert!(c[k].is_integer(), "basis does not span an order");
                    m[(k, j)] = c[k].to_integer();
                }
            }
            m
        })
        .collect()
}

pub(crate) fn mul_coords_mod(table: &[IntMatrix], a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len();
    let mut out = vec![0u64; n];
    for i in 0..n {
        if a[i] == 0 {
            continue;
        }
        for j in 0..n {
            if b[j] == 0 {
                continue;
            }
            let ab = mul_mod(a[i], b[j], p);
            for k in 0..n {
                let t = table[i][(k, j)].mod_floor(&BigInt::from(p)).to_u64().unwrap();
                if t != 0 {
                    out[k] = (out[k] + mul_mod(ab, t, p)) % p;
                }
            }
        }
    }
    out
}

pub(crate) fn pow_coords_mod(table: &[IntMatrix], x: &[u64], mut e: u64, p: u64) -> Vec<u64> {
    let n = x.len();
    let mut acc = vec![0u64; n];
    acc[0] = 1; // the first basis vector is 1 throughout
    let mut base = x.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_coords_mod(table, &acc, &base, p);
        }
        base = mul_coords_mod(table, &base, &base, p);
        e >>= 1;
    }
    acc
}

pub(crate) fn lattice_from_kernel(kernel: &[Vec<u64>], n: usize, p: u64) -> IntMatrix {
    let mut cols: Vec<Vec<BigInt>> = kernel
        .iter()
        .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    for i in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[i] = BigInt::from(p);
        cols.push(e);
    }
    let g = IntMatrix::from_cols(cols, n);
    g.hnf_modular(&num_traits::pow(BigInt::from(p), n))
}

/// One Round-2 step at `p`; returns the enlarged basis or `None` if p-maximal.
fn round2_step(f: &RatPolynomial, b: &RatMatrix, p: u64) -> Option<RatMatrix> {
    let n = b.rows();
    let binv = invert_rat(b);
    let table = order_table(f, b, &binv);
    debug_assert!({
        let one: Vec<BigRational> = b.col(0);
        one[0].is_one() && one[1..].iter().all(|c| c.is_zero())
    });
    let mut q = p;
    while (q as usize) < n {
        q *= p;
    }
    // p-radical: kernel of x -> x^q on O/pO
    let mut frob_rows = vec![vec![0u64; n]; n];
    for i in 0..n {
        let mut e = vec![0u64; n];
        e[i] = 1;
        let img = pow_coords_mod(&table, &e, q, p);
        for k in 0..n {
            frob_rows[k][i] = img[k];
        }
    }
    let ker = fp_kernel(&frob_rows, n, p);
    let radical = lattice_from_kernel(&ker, n, p);
    let rinv = invert_rat(&radical.map(rat));
    // U = {x in O : x I ⊆ p I}
    let pb = BigInt::from(p);
    let mut rows: Vec<Vec<u64>> = vec![vec![0u64; n]; n * n];
    for i in 0..n {
        for k in 0..n {
            let gamma: Vec<BigInt> = radical.col(k);
            let prod = table[i].mul_vec(&gamma);
            let c = rinv.mul_vec(&prod.iter().map(rat).collect::<Vec<_>>());
            for (l, v) in c.into_iter().enumerate() {
                assert!(v.is_integer(), "radical is not an ideal");
                rows[k * n + l][i] = v.to_integer().mod_floor(&pb).to_u64().unwrap();
            }
        }
    }
    let uker = fp_kernel(&rows, n, p);
    if uker.is_empty() {
        return None;
    }
    let u = lattice_from_kernel(&uker, n, p);
    let det = u.det().abs();
    if det == num_traits::pow(pb.clone(), n) {
        return None;
    }
    let scaled = u.map(|v| BigRational::new(v.clone(), pb.clone()));
    let (num, den) = canonical_basis(&(b * &scaled));
    Some(num.map(|v| BigRational::new(v.clone(), den.clone())))
}

/// Maximal order of `Q[x]/(f)`: returns `(num, den)` where the columns of
/// `num / den` are the canonical integral basis in power coordinates.
pub fn maximal_order(f: &IntPolynomial, disc_f: &BigInt) -> Result<(IntMatrix, BigInt)> {
    let n = f.degree();
    let fr = f.to_rational();
    let mut b: RatMatrix = Matrix::identity(n);
    if n > 1 {
        for (p, e) in factor_integer(disc_f) {
            if e < 2 {
                continue;
            }
            let p = p.to_u64().ok_or(Error::Unsupported("prime above 2^64".into()))?;
            if dedekind_maximal(f, p) {
                continue;
            }
            let mut rounds = 0;
            while let Some(nb) = round2_step(&fr, &b, p) {
                b = nb;
                rounds += 1;
                if rounds > ROUND2_CAP {
                    return Err(Error::UnsupportedIndex(p));
                }
            }
        }
    }
    Ok(canonical_basis(&b))
}

/// Column HNF of `den * b` with the smallest common denominator.
pub fn canonical_basis(b: &RatMatrix) -> (IntMatrix, BigInt) {
    let n = b.rows();
    let mut den = BigInt::one();
    for i in 0..n {
        for j in 0..b.cols() {
            den = den.lcm(b[(i, j)].denom());
        }
    }
    let num = b.map(|v| (v * BigRational::from_integer(den.clone())).to_integer());
    let h = num.hnf();
    let h = h.select_cols(&((h.cols() - n)..h.cols()).collect::<Vec<_>>());
    let mut g = den.clone();
    for i in 0..n {
        for j in 0..n {
            g = g.gcd(&h[(i, j)]);
        }
    }
    if g.is_one() {
        (h, den)
    } else {
        (h.map(|v| v / &g), den / &g)
    }
}

pub fn index_of(num: &IntMatrix, den: &BigInt) -> BigInt {
    let n = num.rows();
    let d = num.det().abs();
    let dn = num_traits::pow(den.clone(), n);
    dn / d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedekind() {
        assert!(dedekind_maximal(&Poly::from_i64(&[1, 0, 1]), 2));
        assert!(!dedekind_maximal(&Poly::from_i64(&[-5, 0, 1]), 2));
        assert!(!dedekind_maximal(&Poly::from_i64(&[3, 0, 1]), 2));
    }

    #[test]
    fn quadratic_orders() {
        let f = Poly::from_i64(&[-5, 0, 1]);
        let (num, den) = maximal_order(&f, &f.discriminant()).unwrap();
        assert_eq!(den, BigInt::from(2));
        assert_eq!(num, IntMatrix::from_rows(vec![vec![2.into(), 1.into()], vec![0.into(), 1.into()]]));
        assert_eq!(index_of(&num, &den), BigInt::from(2));
        // x^2 + 27: index 2 * 3 relative to Q(sqrt -3)
        let f = Poly::from_i64(&[27, 0, 1]);
        let (num, den) = maximal_order(&f, &f.discriminant()).unwrap();
        assert_eq!(index_of(&num, &den), BigInt::from(6));
    }

    #[test]
    fn quartic_index() {
        // x^4 + 36 = (x^2+6)^2 - 12 x^2: field Q(sqrt -3, sqrt -1)... check disc 144
        let f = Poly::from_i64(&[36, 0, 0, 0, 1]);
        let df = f.discriminant();
        let (num, den) = maximal_order(&f, &df).unwrap();
        let idx = index_of(&num, &den);
        assert_eq!(&df / (&idx * &idx), BigInt::from(144));
    }
}
