use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::matrix::Matrix;
use crate::error::{Error, Result};

/// `round(a / b)` for `b > 0`, halves rounded up.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    (a * BigInt::from(2) + b).div_floor(&(b * BigInt::from(2)))
}

/// LLL reduction (δ = 99/100) of a positive-definite Gram matrix, in the
/// all-integer form that tracks `d_i = det` of the leading Gram minors and
/// `λ_ij = d_j μ_ij`.
///
/// Returns `(g', t)` with `g' = tᵀ g t`; column `j` of `t` expresses the
/// `j`-th reduced vector in the input basis.
pub fn lll_gram(g: &Matrix<BigInt>) -> (Matrix<BigInt>, Matrix<BigInt>) {
    let n = g.rows();
    let mut gm = g.clone();
    let mut t = Matrix::<BigInt>::identity(n);
    if n <= 1 {
        return (gm, t);
    }
    // 1-based: d[0] = 1, d[i] for vector i; lam[k][j] for j < k
    let mut d = vec![BigInt::zero(); n + 1];
    let mut lam = vec![vec![BigInt::zero(); n + 1]; n + 1];
    d[0] = BigInt::from(1);
    d[1] = gm[(0, 0)].clone();
    let (mut k, mut kmax) = (2usize, 1usize);
    let mut guard = 0usize;
    let redi = |k: usize, l: usize, gm: &mut Matrix<BigInt>, t: &mut Matrix<BigInt>, lam: &mut Vec<Vec<BigInt>>, d: &[BigInt]| {
        if (&lam[k][l] * BigInt::from(2)).abs() <= d[l] {
            return;
        }
        let q = round_div(&lam[k][l], &d[l]);
        let (kk, ll) = (k - 1, l - 1);
        for i in 0..n {
            let v = &t[(i, kk)] - &q * &t[(i, ll)];
            t[(i, kk)] = v;
        }
        for i in 0..n {
            let v = &gm[(i, kk)] - &q * &gm[(i, ll)];
            gm[(i, kk)] = v;
        }
        for i in 0..n {
            let v = &gm[(kk, i)] - &q * &gm[(ll, i)];
            gm[(kk, i)] = v;
        }
        lam[k][l] -= &q * &d[l];
        for i in 1..l {
            let v = &q * &lam[l][i];
            lam[k][i] -= v;
        }
    };
    while k <= n {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = gm[(k - 1, j - 1)].clone();
                for i in 1..j {
                    u = (&d[i] * &u - &lam[k][i] * &lam[j][i]) / &d[i - 1];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    d[k] = u;
                }
            }
        }
        loop {
            guard += 1;
            assert!(guard < 1_000_000, "LLL failed to terminate");
            redi(k, k - 1, &mut gm, &mut t, &mut lam, &d);
            let lhs = &d[k] * &d[k - 2] * 100;
            let rhs = &d[k - 1] * &d[k - 1] * 99 - &lam[k][k - 1] * &lam[k][k - 1] * 100;
            if lhs >= rhs {
                break;
            }
            gm.swap_cols(k - 1, k - 2);
            gm.swap_rows(k - 1, k - 2);
            t.swap_cols(k - 1, k - 2);
            for j in 1..k - 1 {
                let (a, b) = (lam[k][j].clone(), lam[k - 1][j].clone());
                lam[k][j] = b;
                lam[k - 1][j] = a;
            }
            let l = lam[k][k - 1].clone();
            let bb = (&d[k - 2] * &d[k] + &l * &l) / &d[k - 1];
            for i in k + 1..=kmax {
                let tv = lam[i][k].clone();
                lam[i][k] = (&d[k] * &lam[i][k - 1] - &l * &tv) / &d[k - 1];
                lam[i][k - 1] = (&bb * &tv + &l * &lam[i][k]) / &d[k];
            }
            d[k - 1] = bb;
            if k > 2 {
                k -= 1;
            }
        }
        for l in (1..k - 1).rev() {
            redi(k, l, &mut gm, &mut t, &mut lam, &d);
        }
        k += 1;
    }
    (gm, t)
}

/// A lattice vector with its exact quadratic-form value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortVector {
    pub coords: Vec<BigInt>,
    pub norm: BigInt,
}

fn quad_form(g: &Matrix<BigInt>, x: &[BigInt]) -> BigInt {
    let n = g.rows();
    let mut s = BigInt::zero();
    for i in 0..n {
        if x[i].is_zero() {
            continue;
        }
        let mut row = BigInt::zero();
        for j in 0..n {
            row += &g[(i, j)] * &x[j];
        }
        s += &x[i] * row;
    }
    s
}

fn normalize_sign(x: &mut [BigInt]) {
    if let Some(f) = x.iter().find(|v| !v.is_zero()) {
        if f.is_negative() {
            for v in x.iter_mut() {
                *v = -v.clone();
            }
        }
    }
}

/// All nonzero `x` with `xᵀ g x ≤ bound`, one per `±x` pair, sorted by norm.
///
/// Fails with `InconclusiveBound` when more than `limit` vectors qualify.
pub fn short_vectors(g: &Matrix<BigInt>, bound: &BigInt, limit: usize) -> Result<Vec<ShortVector>> {
    let n = g.rows();
    if n == 0 || !bound.is_positive() {
        return Ok(Vec::new());
    }
    let (gr, t) = lll_gram(g);
    // q-form of the reduced Gram matrix in floating point
    let mut q = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..n {
            q[i][j] = gr[(i, j)].to_f64().unwrap();
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    let c = bound.to_f64().unwrap() * (1.0 + 1e-9) + 1e-6;
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    let mut found = 0usize;
    enumerate(&q, c, &mut x, &mut |y: &[i64]| {
        found += 1;
        if found > 4 * limit + 16 {
            return false;
        }
        let yb: Vec<BigInt> = y.iter().map(|&v| BigInt::from(v)).collect();
        let nrm = quad_form(&gr, &yb);
        if nrm.is_zero() || &nrm > bound {
            return true;
        }
        let mut xo = t.mul_vec(&yb);
        normalize_sign(&mut xo);
        out.push(ShortVector { coords: xo, norm: nrm });
        true
    });
    if found > 4 * limit + 16 || out.len() > 2 * limit {
        return Err(Error::InconclusiveBound);
    }
    out.sort_by(|a, b| a.norm.cmp(&b.norm).then_with(|| a.coords.cmp(&b.coords)));
    out.dedup();
    if out.len() > limit {
        return Err(Error::InconclusiveBound);
    }
    Ok(out)
}

/// Depth-first Fincke–Pohst enumeration of the upper half-space; the callback
/// sees each candidate once per ± pair and returns false to abort.
fn enumerate(q: &[Vec<f64>], c: f64, x: &mut [i64], cb: &mut dyn FnMut(&[i64]) -> bool) {
    let n = q.len();
    fn rec(
        q: &[Vec<f64>],
        i: usize,
        n: usize,
        rem: f64,
        x: &mut [i64],
        all_zero_above: bool,
        cb: &mut dyn FnMut(&[i64]) -> bool,
    ) -> bool {
        let mut center = 0.0;
        for j in i + 1..n {
            center -= q[i][j] * x[j] as f64;
        }
        let rad = (rem / q[i][i]).max(0.0).sqrt();
        let lo = (center - rad - 1e-9).ceil() as i64;
        let hi = (center + rad + 1e-9).floor() as i64;
        let lo = if all_zero_above { lo.max(0) } else { lo };
        for v in lo..=hi {
            x[i] = v;
            let d = v as f64 - center;
            let r = rem - q[i][i] * d * d;
            if r < -1e-9 * (1.0 + rem.abs()) {
                continue;
            }
            let zero_here = all_zero_above && v == 0;
            if i == 0 {
                if !zero_here && !cb(x) {
                    x[i] = 0;
                    return false;
                }
            } else if !rec(q, i - 1, n, r, x, zero_here, cb) {
                x[i] = 0;
                return false;
            }
        }
        x[i] = 0;
        true
    }
    rec(q, n - 1, n, c, x, true, cb);
}

/// Exact value of `xᵀ g x`.
pub fn gram_norm(g: &Matrix<BigInt>, x: &[BigInt]) -> BigInt {
    quad_form(g, x)
}

/// Minimum nonzero value of a positive-definite form and the vectors attaining it.
pub fn minimum(g: &Matrix<BigInt>) -> (BigInt, Vec<Vec<BigInt>>) {
    let (gr, _) = lll_gram(g);
    let bound = (0..gr.rows()).map(|i| gr[(i, i)].clone()).min().unwrap();
    let v = short_vectors(g, &bound, 1 << 20).expect("minimal vectors of a reduced form are few");
    let m = v[0].norm.clone();
    let vs = v.into_iter().filter(|s| s.norm == m).map(|s| s.coords).collect();
    (m, vs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn im(rows: Vec<Vec<i64>>) -> Matrix<BigInt> {
        Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect())
    }

    #[test]
    fn lll_preserves_determinant() {
        let g = im(vec![vec![201, 37, 5], vec![37, 11, 2], vec![5, 2, 3]]);
        let (gr, t) = lll_gram(&g);
        assert_eq!(gr.det(), g.det());
        assert_eq!(&(&t.transpose() * &g) * &t, gr);
        assert_eq!(t.det().abs(), BigInt::one());
    }

    #[test]
    fn short_vectors_brute_force() {
        let g = im(vec![vec![10, 3, 1], vec![3, 6, -2], vec![1, -2, 5]]);
        let bound = BigInt::from(30);
        let sv = short_vectors(&g, &bound, 1000).unwrap();
        let mut brute = Vec::new();
        for a in -6i64..=6 {
            for b in -6i64..=6 {
                for c in -6i64..=6 {
                    let x = vec![BigInt::from(a), BigInt::from(b), BigInt::from(c)];
                    let n = quad_form(&g, &x);
                    if !n.is_zero() && n <= bound {
                        let mut y = x.clone();
                        normalize_sign(&mut y);
                        brute.push(ShortVector { coords: y, norm: n });
                    }
                }
            }
        }
        brute.sort_by(|a, b| a.norm.cmp(&b.norm).then_with(|| a.coords.cmp(&b.coords)));
        brute.dedup();
        assert_eq!(sv, brute);
        let (m, vs) = minimum(&g);
        assert_eq!(m, BigInt::from(5));
        assert_eq!(vs.len(), 1);
    }
}
