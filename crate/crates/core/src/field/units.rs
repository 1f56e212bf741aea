//! Units of CM fields: roots of unity, the fundamental unit of the real
//! subfield and the unit index.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::NumberField;
use crate::classgroup::real::{fundamental_unit, unit_log};
use crate::error::{Error, Result};
use crate::exact::lattice::short_vectors;
use crate::exact::ComplexBall;

/// All roots of unity of a CM field (or `±1` for fields with a real place),
/// in integral coordinates. The first entry is `1`.
pub fn roots_of_unity(k: &NumberField) -> Result<Vec<Vec<BigInt>>> {
    let one = k.one_coords();
    let minus: Vec<BigInt> = one.iter().map(|c| -c).collect();
    let Some(cm) = k.cm() else {
        return Ok(vec![one, minus]);
    };
    let n = BigInt::from(k.degree());
    let vs = short_vectors(&cm.t2_gram, &n, 10_000)?;
    let mut out = vec![one.clone(), minus];
    for v in vs {
        if v.coords == one {
            continue;
        }
        let neg: Vec<BigInt> = v.coords.iter().map(|c| -c).collect();
        out.push(v.coords);
        out.push(neg);
    }
    out.sort_by_key(|v| v == &one);
    out.reverse();
    Ok(out)
}

/// Number of roots of unity.
pub fn unity_count(k: &NumberField) -> Result<u64> {
    Ok(roots_of_unity(k)?.len() as u64)
}

/// Fundamental unit of the maximal real subfield, embedded in the field.
#[derive(Clone, Debug)]
pub struct RealUnit {
    /// Coordinates of the unit in the CM field.
    pub coords: Vec<BigInt>,
    /// Norm of the unit down to `Q`.
    pub norm: i32,
    /// `ln` of the unit in the embedding where it exceeds one.
    pub regulator: f64,
}

/// `None` when the real subfield is `Q`.
pub fn real_fundamental_unit(k: &NumberField) -> Result<Option<RealUnit>> {
    let cm = k.cm().ok_or(Error::NotCM)?;
    let e0 = &cm.real_subfield;
    if e0.degree() == 1 {
        return Ok(None);
    }
    let d0 = e0.discriminant().to_i64().ok_or_else(|| Error::Unsupported("real subfield discriminant".into()))?;
    let (x, y, norm) = fundamental_unit(d0)?;
    let mut coords: Vec<BigInt> = cm.real_generator.iter().map(|c| c * &y).collect();
    coords[0] += &x;
    Ok(Some(RealUnit { coords, norm, regulator: unit_log(d0, &x, &y) }))
}

/// A square root of `beta` in the field, if one exists.
pub fn square_root(k: &NumberField, beta: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    let n = k.degree();
    if beta.iter().all(Zero::is_zero) {
        return Ok(Some(beta.to_vec()));
    }
    let size = beta.iter().map(|c| c.bits()).max().unwrap_or(1) as u32;
    for prec in [128u32, 256, 512, 1024] {
        let prec = prec + 2 * size;
        let rs = k.roots(prec)?;
        let vals: Vec<ComplexBall> = (0..n).map(|s| k.embed_int(beta, s, prec)).collect::<Result<_>>()?;
        // candidate roots per embedding: +-(u + iv), +-(u - iv)
        let mut cands = Vec::with_capacity(n);
        for z in &vals {
            let r = z.abs()?;
            let u = (&(&r + &z.re).mul_pow2(-1)).sqrt()?;
            let v = (&(&r - &z.re).mul_pow2(-1)).sqrt()?;
            let mut c = Vec::new();
            for (a, b) in [(u.clone(), v.clone()), (u.clone(), -&v), (-&u, v.clone()), (-&u, -&v)] {
                let w = ComplexBall::new(a, b);
                let sq = &w * &w;
                if sq.overlaps(z) {
                    c.push(w);
                }
            }
            if c.is_empty() {
                return Ok(None);
            }
            cands.push(c);
        }
        // choose on one embedding of each conjugate pair, forcing the other
        let reps: Vec<usize> = (0..n).filter(|&s| rs.conj[s] >= s).collect();
        let mut idx = vec![0usize; reps.len()];
        let mut imprecise = false;
        loop {
            let mut values: Vec<Option<ComplexBall>> = vec![None; n];
            for (j, &s) in reps.iter().enumerate() {
                let w = cands[s][idx[j]].clone();
                let t = rs.conj[s];
                values[t] = Some(w.conj());
                values[s] = Some(w);
            }
            let values: Vec<ComplexBall> = values.into_iter().map(|v| v.unwrap()).collect();
            match k.recover_integral(&values, prec) {
                Ok(Some(a)) => {
                    if k.mul_int(&a, &a) == beta {
                        return Ok(Some(a));
                    }
                }
                Ok(None) => {}
                Err(Error::PrecisionExhausted(_)) => imprecise = true,
                Err(e) => return Err(e),
            }
            let mut j = 0;
            loop {
                if j == reps.len() {
                    break;
                }
                idx[j] += 1;
                if idx[j] < cands[reps[j]].len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == reps.len() {
                break;
            }
        }
        if !imprecise {
            return Ok(None);
        }
    }
    Err(Error::PrecisionExhausted(1024))
}

/// The unit index `[O_K^* : mu_K O_{K0}^*]`, which is 1 or 2.
pub fn unit_index(k: &NumberField) -> Result<u32> {
    let Some(eps) = real_fundamental_unit(k)? else {
        return Ok(1);
    };
    if eps.norm == -1 {
        return Ok(1);
    }
    for z in roots_of_unity(k)? {
        let beta = k.mul_int(&z, &eps.coords);
        if square_root(k, &beta)?.is_some() {
            return Ok(2);
        }
    }
    Ok(1)
}

/// Regulator of the CM field, normalised as `2 R(K0) / Q` for quartic fields
/// and `1` for imaginary quadratic fields.
pub fn regulator(k: &NumberField) -> Result<f64> {
    match real_fundamental_unit(k)? {
        None => Ok(1.0),
        Some(eps) => {
            let q = unit_index(k)? as f64;
            Ok(2.0 * eps.regulator / q)
        }
    }
}

/// `|N(x)| = 1` for an integral element.
pub fn is_unit(k: &NumberField, x: &[BigInt]) -> bool {
    k.norm_int(x).abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Poly;
    use crate::field::construct_field;

    #[test]
    fn roots_of_unity_counts() {
        let f = |c: &[i64]| construct_field(&Poly::from_i64(c)).unwrap();
        assert_eq!(unity_count(&f(&[1, 0, 1])).unwrap(), 4);
        assert_eq!(unity_count(&f(&[1, -1, 1])).unwrap(), 6);
        assert_eq!(unity_count(&f(&[5, 0, 1])).unwrap(), 2);
        assert_eq!(unity_count(&f(&[1, 1, 1, 1, 1])).unwrap(), 10);
        assert_eq!(unity_count(&f(&[1, 0, 0, 0, 1])).unwrap(), 8);
    }

    #[test]
    fn unit_indices() {
        let f = |c: &[i64]| construct_field(&Poly::from_i64(c)).unwrap();
        // Q(zeta5): eps0 = golden ratio has norm -1
        assert_eq!(unit_index(&f(&[1, 1, 1, 1, 1])).unwrap(), 1);
        // Q(zeta8): 1 + sqrt2 has norm -1
        assert_eq!(unit_index(&f(&[1, 0, 0, 0, 1])).unwrap(), 1);
        // Q(zeta12)
        assert_eq!(unit_index(&f(&[1, 0, -1, 0, 1])).unwrap(), 2);
        // Q(sqrt -2, sqrt 3): -(2 + sqrt3) is a square
        assert_eq!(unit_index(&f(&[1, 0, 4, 0, 1])).unwrap(), 2);
        let k = f(&[9, 0, -2, 0, 1]);
        let s = square_root(&k, &k.mul_int(&k.generator().integral_coords().unwrap(), &k.generator().integral_coords().unwrap())).unwrap();
        assert!(s.is_some());
    }
}
