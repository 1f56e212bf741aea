use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{construct_field, order, quadratic_poly, rational_field, NumberField};
use crate::exact::lattice::short_vectors;
use crate::exact::Poly;
use crate::{IntMatrix, IntPolynomial};

/// CM structure of a field: its maximal totally real subfield and complex
/// conjugation as an automorphism.
#[derive(Clone, Debug)]
pub struct CmData {
    pub real_subfield: NumberField,
    /// Column `j` holds the integral coordinates of the conjugate of basis element `j`.
    pub conjugation: IntMatrix,
    /// Coordinates in the CM field of the standard generator of the real subfield.
    pub real_generator: Vec<BigInt>,
    /// Gram matrix of `T2(x) = Tr(x conj(x))` on the integral basis.
    pub t2_gram: IntMatrix,
}

fn rat(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

fn is_automorphism(k: &NumberField, c: &IntMatrix) -> bool {
    let n = k.degree();
    let img: Vec<Vec<BigInt>> = (0..n).map(|j| c.col(j)).collect();
    for i in 0..n {
        for j in 0..n {
            let prod = k.basis_mul_matrix(i).col(j);
            let lhs = c.mul_vec(&prod);
            let rhs = k.mul_int(&img[i], &img[j]);
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

fn t2_gram(k: &NumberField, c: &IntMatrix) -> IntMatrix {
    let n = k.degree();
    let mut g = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut e = vec![BigInt::zero(); n];
            e[i] = BigInt::one();
            g[(i, j)] = k.trace_int(&k.mul_int(&e, &c.col(j)));
        }
    }
    g
}

fn conjugation_quadratic(k: &NumberField) -> IntMatrix {
    let tr = k.trace_int(&[BigInt::zero(), BigInt::one()]);
    IntMatrix::from_rows(vec![vec![BigInt::one(), tr], vec![BigInt::zero(), -BigInt::one()]])
}

/// Conjugation matrix recovered from the Hermitian Gram matrix of the
/// embeddings, then certified as an exact involutive automorphism.
fn conjugation_numeric(k: &NumberField) -> Option<IntMatrix> {
    let n = k.degree();
    let tinv = order::invert_rat(&k.trace_form().map(rat));
    for prec in [128u32, 256, 512] {
        let rs = k.roots(prec).ok()?;
        let mut imgs = Vec::with_capacity(n);
        for i in 0..n {
            let mut e = vec![BigInt::zero(); n];
            e[i] = BigInt::one();
            let v: Vec<_> = (0..n).map(|s| k.embed_int(&e, s, prec)).collect::<Result<_, _>>().ok()?;
            imgs.push(v);
        }
        let mut h = IntMatrix::zeros(n, n);
        let mut ok = true;
        'outer: for i in 0..n {
            for j in 0..n {
                let mut acc = crate::exact::ComplexBall::zero(rs.precision);
                for s in 0..n {
                    acc = &acc + &(&imgs[i][s] * &imgs[j][s].conj());
                }
                if acc.re.rad_f64() > 0.25 {
                    ok = false;
                    break 'outer;
                }
                h[(i, j)] = acc.re.unique_integer()?;
            }
        }
        if !ok {
            continue;
        }
        let c = &tinv * &h.map(rat);
        if !(0..n).all(|i| (0..n).all(|j| c[(i, j)].is_integer())) {
            return None;
        }
        let c = c.map(|v| v.to_integer());
        let id = IntMatrix::identity(n);
        if c == id || &c * &c != id || !is_automorphism(k, &c) {
            return None;
        }
        // the automorphism must act as complex conjugation under every embedding
        for j in 0..n {
            let img = c.col(j);
            for s in 0..n {
                let z = k.embed_int(&img, s, prec).ok()?;
                if !z.overlaps(&imgs[j][s].conj()) {
                    return None;
                }
            }
        }
        return Some(c);
    }
    None
}

fn real_subfield(k: &NumberField, c: &IntMatrix) -> Option<(NumberField, Vec<BigInt>)> {
    let n = k.degree();
    if n == 2 {
        return Some((rational_field(), k.one_coords()));
    }
    let a = c - &IntMatrix::identity(n);
    let (h, u) = a.hnf_with_transform();
    let zero_cols: Vec<usize> = (0..n).filter(|&j| (0..n).all(|i| h[(i, j)].is_zero())).collect();
    if zero_cols.len() != n / 2 || n != 4 {
        return None;
    }
    let kern = u.select_cols(&zero_cols);
    let proj = kern.select_rows(&(1..n).collect::<Vec<_>>());
    let (ph, pu) = proj.hnf_with_transform();
    let last = ph.cols() - 1;
    let comb = pu.col(last);
    let w = kern.mul_vec(&comb);
    let mp = k.element_int(&w).minpoly();
    let b = mp.coeff(1).to_integer();
    let cc = mp.coeff(0).to_integer();
    let d0 = &b * &b - BigInt::from(4) * &cc;
    let d0i: i64 = d0.to_string().parse().ok()?;
    let s = if d0i.rem_euclid(4) == 1 { (&b + 1) / 2 } else { &b / 2 };
    let mut g = w.clone();
    g[0] += &s;
    let e0 = construct_field(&quadratic_poly(d0i)).ok()?;
    let val = k.eval_int_poly(&quadratic_poly(d0i), &g);
    if val.iter().any(|v| !v.is_zero()) {
        return None;
    }
    Some((e0, g))
}

pub(super) fn detect(k: &NumberField) -> Option<CmData> {
    let n = k.degree();
    if n % 2 == 1 || !k.is_totally_imaginary() {
        return None;
    }
    let c = match n {
        2 => conjugation_quadratic(k),
        4 => conjugation_numeric(k)?,
        _ => return None,
    };
    let (real, gen) = real_subfield(k, &c)?;
    let t2 = t2_gram(k, &c);
    Some(CmData { real_subfield: real, conjugation: c, real_generator: gen, t2_gram: t2 })
}

fn poly_key(f: &IntPolynomial) -> Vec<(BigInt, bool)> {
    f.coeffs().iter().rev().skip(1).map(|a| (a.abs(), a.is_negative())).collect()
}

fn reflect_sign(f: &IntPolynomial) -> IntPolynomial {
    let n = f.degree();
    Poly::new(
        f.coeffs()
            .iter()
            .enumerate()
            .map(|(i, a)| if (n - i) % 2 == 1 { -a.clone() } else { a.clone() })
            .collect(),
    )
}

/// A defining polynomial that depends only on the isomorphism class.
///
/// Quadratic fields use the standard generator; CM fields take the smallest
/// minimal polynomial among generators of minimal `T2`. Other fields fall back
/// to their defining polynomial.
pub fn canonical_polynomial(k: &NumberField) -> IntPolynomial {
    let n = k.degree();
    match n {
        1 => return Poly::from_i64(&[0, 1]),
        2 => {
            let d: i64 = k.discriminant().to_string().parse().expect("quadratic discriminant fits i64");
            return quadratic_poly(d);
        }
        _ => {}
    }
    let Some(cm) = k.cm() else {
        return k.poly().clone();
    };
    let g = &cm.t2_gram;
    let mut bound = BigInt::from(2 * n);
    loop {
        let Ok(vs) = short_vectors(g, &bound, 20_000) else {
            return k.poly().clone();
        };
        let mut best: Option<(BigInt, IntPolynomial)> = None;
        for v in vs {
            if let Some((m, _)) = &best {
                if &v.norm > m {
                    break;
                }
            }
            let mp = k.element_int(&v.coords).minpoly();
            if mp.degree() != n {
                continue;
            }
            let f = mp.to_primitive_int();
            let f2 = reflect_sign(&f);
            let cand = if poly_key(&f2) < poly_key(&f) { f2 } else { f };
            best = match best {
                Some((m, b)) if poly_key(&b) <= poly_key(&cand) => Some((m, b)),
                _ => Some((v.norm.clone(), cand)),
            };
        }
        if let Some((_, f)) = best {
            return f;
        }
        bound *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_cm() {
        let k = construct_field(&Poly::from_i64(&[1, 0, 1])).unwrap();
        let cm = k.cm().unwrap();
        assert_eq!(cm.real_subfield.degree(), 1);
        let i = k.generator();
        assert_eq!(i.conj().unwrap(), i.neg());
        assert!(construct_field(&Poly::from_i64(&[-2, 0, 1])).unwrap().cm().is_none());
    }

    #[test]
    fn cyclotomic_cm() {
        let k = construct_field(&Poly::from_i64(&[1, 1, 1, 1, 1])).unwrap();
        let cm = k.cm().expect("Q(zeta5) is CM");
        assert_eq!(cm.real_subfield.discriminant(), &BigInt::from(5));
        let z = k.generator();
        assert_eq!(z.conj().unwrap(), z.pow(4));
        assert_eq!(canonical_polynomial(&k), Poly::from_i64(&[1, 1, 1, 1, 1]));
    }

    #[test]
    fn canonical_is_invariant() {
        // two generators of Q(sqrt -1, sqrt 2)
        let a = construct_field(&Poly::from_i64(&[1, 0, 0, 0, 1])).unwrap();
        let b = construct_field(&Poly::from_i64(&[9, 0, -2, 0, 1])).unwrap();
        assert_eq!(a.discriminant(), b.discriminant());
        assert_eq!(canonical_polynomial(&a), canonical_polynomial(&b));
    }
}
