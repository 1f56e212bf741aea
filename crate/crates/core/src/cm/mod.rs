//! CM types, primitivity, reflex fields and the type norm on elements and
//! ideals.

pub mod galois;

pub use galois::{galois_closure, GaloisClosure, Perm};

use num_bigint::BigInt;
use num_traits::{Pow, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::roots::{is_irreducible, poly_from_roots};
use crate::exact::ComplexBall;
use crate::field::{canonical_polynomial, construct_field, NumberField};
use crate::ideal::IntegralIdeal;
use galois::{round_coefficients, Rounded};

/// A CM type, stored as a bitmask over the root order of the defining
/// polynomial: bit `i` is set when embedding `i` is chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CmType {
    field: NumberField,
    mask: u32,
    primitive: bool,
}

impl CmType {
    /// Validate a mask as a CM type of `k`.
    pub fn from_mask(k: &NumberField, mask: u32) -> Result<Self> {
        let closure = galois_closure(k)?;
        Self::with_closure(&closure, mask)
    }

    fn with_closure(closure: &GaloisClosure, mask: u32) -> Result<Self> {
        let k = closure.field();
        if !k.is_cm() {
            return Err(Error::NotCM);
        }
        let n = k.degree();
        let conj = &closure.roots().conj;
        let valid = mask >> n == 0
            && mask.count_ones() as usize * 2 == n
            && (0..n).all(|i| (mask >> i & 1) != (mask >> conj[i] & 1));
        if !valid {
            return Err(Error::DegenerateInput(format!("mask {mask:#b} is not a CM type")));
        }
        let primitive = primitive_in(closure, mask);
        Ok(CmType { field: k.clone(), mask, primitive })
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    /// Chosen embeddings, as root indices.
    pub fn embeddings(&self) -> Vec<usize> {
        (0..self.field.degree()).filter(|&i| self.contains(i)).collect()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask >> i & 1 == 1
    }

    /// Half the degree of the field.
    pub fn dimension(&self) -> usize {
        self.field.degree() / 2
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive
    }
}

/// Members of the group whose restriction to the field lies in the type.
fn lift(closure: &GaloisClosure, mask: u32) -> Vec<usize> {
    (0..closure.order()).filter(|&g| mask >> closure.field_embedding(g) & 1 == 1).collect()
}

fn primitive_in(closure: &GaloisClosure, mask: u32) -> bool {
    let lifted = lift(closure, mask);
    let own = closure.field_stabilizer();
    for h in closure.subgroups() {
        if h.len() == own.len() || h.len() == closure.order() || !own.iter().all(|g| h.contains(g)) {
            continue;
        }
        let induced = lifted.iter().all(|&a| h.iter().all(|&b| lifted.contains(&closure.mul(a, b))));
        if induced {
            return false;
        }
    }
    true
}

/// All `2^g` CM types, in increasing bitmask order.
pub fn enumerate_cm_types(k: &NumberField) -> Result<Vec<CmType>> {
    if !k.is_cm() {
        return Err(Error::NotCM);
    }
    let closure = galois_closure(k)?;
    enumerate_with(&closure)
}

fn enumerate_with(closure: &GaloisClosure) -> Result<Vec<CmType>> {
    let conj = &closure.roots().conj;
    let pairs: Vec<(usize, usize)> = (0..conj.len()).filter(|&i| i < conj[i]).map(|i| (i, conj[i])).collect();
    let mut masks: Vec<u32> = (0..1u32 << pairs.len())
        .map(|bits| {
            pairs.iter().enumerate().fold(0u32, |m, (j, &(a, b))| m | 1 << if bits >> j & 1 == 0 { a } else { b })
        })
        .collect();
    masks.sort_unstable();
    masks.into_iter().map(|m| CmType::with_closure(closure, m)).collect()
}

pub fn is_primitive(t: &CmType) -> bool {
    t.primitive
}

/// The reflex field and type of a CM type, with the data needed to evaluate
/// the type norm from the reflex field back to the field.
#[derive(Clone, Debug)]
pub struct ReflexPair {
    cm_type: CmType,
    closure: GaloisClosure,
    field: NumberField,
    reflex_type: CmType,
    /// For each group element `h`, the root of the reflex polynomial that
    /// the reflex generator is sent to under `h`.
    embedding: Vec<usize>,
    /// For each embedding of the field, the embeddings of the reflex field
    /// whose product gives the type norm there.
    norm_masks: Vec<u32>,
    exponent: u32,
}

const TRIALS: [&[i64]; 6] = [&[0, 1], &[0, 0, 1], &[0, 1, 1], &[0, 1, 2], &[0, 0, 0, 1], &[0, 1, 0, 1]];

fn eval_at(c: &[i64], z: &ComplexBall, prec: u32) -> ComplexBall {
    let mut acc = ComplexBall::zero(prec);
    for &a in c.iter().rev() {
        acc = &(&acc * z) + &ComplexBall::from_f64(a as f64, 0.0, prec);
    }
    acc
}

/// Reflex field and type.
pub fn reflex(t: &CmType) -> Result<ReflexPair> {
    let closure = galois_closure(t.field())?;
    reflex_with(t, closure)
}

fn reflex_with(t: &CmType, closure: GaloisClosure) -> Result<ReflexPair> {
    let mut last = Error::RecognitionFailure;
    for prec in [256u32, 512, 1024, 2048] {
        match reflex_at(t, &closure, prec) {
            Err(e @ Error::PrecisionExhausted(_)) => last = e,
            other => return other,
        }
    }
    Err(last)
}

fn reflex_at(t: &CmType, closure: &GaloisClosure, prec: u32) -> Result<ReflexPair> {
    let k = t.field();
    let n = k.degree();
    let m = closure.order();
    let roots = k.roots(prec)?;
    let chosen = t.embeddings();
    let image = |g: usize| -> Vec<usize> {
        let mut v: Vec<usize> = chosen.iter().map(|&i| closure.elements()[g][i]).collect();
        v.sort_unstable();
        v
    };
    // cosets of the stabilizer of the type in the root action
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of = vec![0usize; m];
    for g in 0..m {
        let img = image(g);
        match classes.iter().position(|c| c == &img) {
            Some(c) => class_of[g] = c,
            None => {
                class_of[g] = classes.len();
                classes.push(img);
            }
        }
    }
    let degree = classes.len();
    let mut recognized = None;
    for trial in TRIALS {
        let vals: Vec<ComplexBall> = classes
            .iter()
            .map(|c| c.iter().fold(ComplexBall::zero(prec), |acc, &i| &acc + &eval_at(trial, &roots.roots[i], prec)))
            .collect();
        let distinct = (0..degree).all(|a| (a + 1..degree).all(|b| !vals[a].overlaps(&vals[b])));
        if !distinct {
            continue;
        }
        let refs: Vec<&ComplexBall> = vals.iter().collect();
        match round_coefficients(&poly_from_roots(&refs, prec)) {
            Rounded::Imprecise => return Err(Error::PrecisionExhausted(prec as u64)),
            Rounded::NotIntegral => return Err(Error::RecognitionFailure),
            Rounded::Integral(f) => {
                recognized = Some((f, vals));
                break;
            }
        }
    }
    let (f, vals) = recognized.ok_or(Error::PrecisionExhausted(prec as u64))?;
    if !is_irreducible(&f)? {
        return Err(Error::RecognitionFailure);
    }
    let field = construct_field(&f)?;
    if !field.is_cm() {
        return Err(Error::RecognitionFailure);
    }
    let reflex_roots = field.roots(prec)?;
    let mut root_of_class = Vec::with_capacity(degree);
    for v in &vals {
        let hits: Vec<usize> = (0..degree).filter(|&j| reflex_roots.roots[j].overlaps(v)).collect();
        match hits.as_slice() {
            [j] => root_of_class.push(*j),
            _ => return Err(Error::PrecisionExhausted(prec as u64)),
        }
    }
    let embedding: Vec<usize> = (0..m).map(|g| root_of_class[class_of[g]]).collect();
    let lifted = lift(closure, t.mask());
    let dual: Vec<usize> = lifted.iter().map(|&g| closure.inv(g)).collect();
    let mut norm_masks = vec![None; n];
    for s in 0..m {
        let j = closure.field_embedding(s);
        let mask = dual.iter().fold(0u32, |acc, &g| acc | 1 << embedding[closure.mul(s, g)]);
        match norm_masks[j] {
            None => norm_masks[j] = Some(mask),
            Some(prev) if prev == mask => {}
            Some(_) => return Err(Error::RecognitionFailure),
        }
    }
    let norm_masks: Vec<u32> = norm_masks.into_iter().map(|x| x.expect("transitive action")).collect();
    let reflex_closure = galois_closure(&field)?;
    let reflex_type = CmType::with_closure(&reflex_closure, norm_masks[0])?;
    let exponent = (n * reflex_type.dimension() / degree) as u32;
    Ok(ReflexPair {
        cm_type: t.clone(),
        closure: closure.clone(),
        field,
        reflex_type,
        embedding,
        norm_masks,
        exponent,
    })
}

impl ReflexPair {
    pub fn cm_type(&self) -> &CmType {
        &self.cm_type
    }

    pub fn closure(&self) -> &GaloisClosure {
        &self.closure
    }

    /// The reflex field.
    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn reflex_type(&self) -> &CmType {
        &self.reflex_type
    }

    /// Root of the reflex polynomial hit by the reflex generator under each group element.
    pub fn embedding(&self) -> &[usize] {
        &self.embedding
    }

    /// `N(type_norm(x)) = N(x)^exponent`.
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// Type norm of an integral element of the reflex field, in integral
    /// coordinates of the field.
    pub fn type_norm(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        let e = self.cm_type.field();
        let r = &self.field;
        if x.len() != r.degree() {
            return Err(Error::FieldMismatch);
        }
        let size = x.iter().map(BigInt::bits).max().unwrap_or(1) as u32;
        let nx = r.norm_int(x);
        let mut last = Error::RecognitionFailure;
        for base in [256u32, 512, 1024, 2048, 4096] {
            let prec = base + 4 * size * self.reflex_type.dimension() as u32;
            let images: Vec<ComplexBall> =
                (0..r.degree()).map(|s| r.embed_int(x, s, prec)).collect::<Result<_>>()?;
            let values: Vec<ComplexBall> = self
                .norm_masks
                .iter()
                .map(|&mask| {
                    (0..r.degree())
                        .filter(|&s| mask >> s & 1 == 1)
                        .fold(ComplexBall::one(prec), |acc, s| &acc * &images[s])
                })
                .collect();
            match e.recover_integral(&values, prec) {
                Ok(Some(y)) => {
                    let cm = e.cm().ok_or(Error::NotCM)?;
                    let ybar = cm.conjugation.mul_vec(&y);
                    let scalar: Vec<BigInt> = e.one_coords().iter().map(|c| c * &nx).collect();
                    if e.norm_int(&y) != Pow::pow(&nx, self.exponent) || e.mul_int(&y, &ybar) != scalar {
                        return Err(Error::RecognitionFailure);
                    }
                    return Ok(y);
                }
                Ok(None) => return Err(Error::RecognitionFailure),
                Err(err @ Error::PrecisionExhausted(_)) => last = err,
                Err(err) => return Err(err),
            }
        }
        Err(last)
    }

    /// Type norm of an integral ideal of the reflex field.
    ///
    /// The result is generated by type norms of elements of `I` and is
    /// certified by `N(J) = N(I)^exponent` and `J conj(J) = (N(I))`.
    pub fn type_norm_ideal(&self, i: &IntegralIdeal) -> Result<IntegralIdeal> {
        if i.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        let e = self.cm_type.field();
        let target = Pow::pow(i.norm(), self.exponent);
        let m = i.min_integer();
        let mpow = Pow::pow(m, self.reflex_type.dimension() as u32);
        let mut gens: Vec<Vec<BigInt>> = vec![e.one_coords().iter().map(|c| c * &mpow).collect()];
        let basis = i.basis();
        let cols: Vec<Vec<BigInt>> = (0..basis.cols()).map(|j| basis.col(j)).collect();
        for c in &cols {
            if c.iter().any(|v| !v.is_zero()) && !c[1..].iter().all(Zero::is_zero) {
                gens.push(self.type_norm(c)?);
            }
        }
        let mut j = IntegralIdeal::from_generators(e, &gens);
        let mut rng = ChaCha8Rng::seed_from_u64(0x7e1e);
        let mut rounds = 0;
        while j.norm() != &target {
            rounds += 1;
            if rounds > 64 || !(j.norm() % &target).is_zero() {
                return Err(Error::RecognitionFailure);
            }
            let n = cols.len();
            let mut x = vec![BigInt::zero(); n];
            for c in &cols {
                let k = BigInt::from(rng.gen_range(-4i64..=4));
                for (xi, ci) in x.iter_mut().zip(c) {
                    *xi += &k * ci;
                }
            }
            if x.iter().all(Zero::is_zero) {
                continue;
            }
            gens.push(self.type_norm(&x)?);
            j = IntegralIdeal::from_generators(e, &gens);
        }
        let jbar = j.conj().ok_or(Error::NotCM)?;
        if j.mul(&jbar)? != IntegralIdeal::principal_int(e, i.norm()) {
            return Err(Error::RecognitionFailure);
        }
        Ok(j)
    }

    /// Reflex of the reflex type.
    pub fn double_reflex(&self) -> Result<ReflexPair> {
        reflex(&self.reflex_type)
    }

    /// Whether the double reflex is isomorphic to the original field.
    pub fn double_reflex_recovers_field(&self) -> Result<bool> {
        let back = self.double_reflex()?;
        Ok(canonical_polynomial(back.field()) == canonical_polynomial(self.cm_type.field()))
    }
}

/// Whether the reflex field is isomorphic to the field itself.
pub fn is_self_reflex(t: &CmType) -> Result<bool> {
    let r = reflex(t)?;
    Ok(canonical_polynomial(r.field()) == canonical_polynomial(t.field()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Poly;
    use crate::ideal::primes_above;

    fn field(c: &[i64]) -> NumberField {
        construct_field(&Poly::from_i64(c)).unwrap()
    }

    #[test]
    fn counts_and_primitivity() {
        let qi = field(&[1, 0, 1]);
        let ts = enumerate_cm_types(&qi).unwrap();
        assert_eq!(ts.len(), 2);
        assert!(ts.iter().all(CmType::is_primitive));
        let z5 = field(&[1, 1, 1, 1, 1]);
        let ts = enumerate_cm_types(&z5).unwrap();
        assert_eq!(ts.len(), 4);
        assert!(ts.iter().all(CmType::is_primitive));
        let bq = field(&[1, 0, 0, 0, 1]);
        let ts = enumerate_cm_types(&bq).unwrap();
        assert_eq!(ts.len(), 4);
        assert!(ts.iter().all(|t| !t.is_primitive()));
        assert_eq!(enumerate_cm_types(&field(&[-2, 0, 1])), Err(Error::NotCM));
    }

    #[test]
    fn reflex_fields() {
        let z5 = field(&[1, 1, 1, 1, 1]);
        for t in enumerate_cm_types(&z5).unwrap() {
            let r = reflex(&t).unwrap();
            assert_eq!(r.field().degree(), 4);
            assert!(r.double_reflex_recovers_field().unwrap());
        }
        let bq = field(&[1, 0, 0, 0, 1]);
        let mut seen = Vec::new();
        for t in enumerate_cm_types(&bq).unwrap() {
            let r = reflex(&t).unwrap();
            assert_eq!(r.field().degree(), 2);
            seen.push(r.field().discriminant().clone());
        }
        seen.sort();
        seen.dedup();
        assert_eq!(seen, vec![BigInt::from(-8), BigInt::from(-4)]);
        let d4 = field(&[3, 0, 5, 0, 1]);
        for t in enumerate_cm_types(&d4).unwrap() {
            assert!(t.is_primitive());
            let r = reflex(&t).unwrap();
            assert_eq!(r.field().degree(), 4);
            assert!(r.double_reflex_recovers_field().unwrap());
        }
    }

    #[test]
    fn quadratic_type_norm_is_identity_or_conjugation() {
        let k = field(&[6, 1, 1]);
        for t in enumerate_cm_types(&k).unwrap() {
            let r = reflex(&t).unwrap();
            assert_eq!(r.exponent(), 1);
            let p = &primes_above(r.field(), 2).unwrap()[0];
            let j = r.type_norm_ideal(&p.ideal).unwrap();
            assert_eq!(j.norm(), &BigInt::from(2));
        }
    }

    #[test]
    fn cyclotomic_type_norm() {
        let z5 = field(&[1, 1, 1, 1, 1]);
        let t = &enumerate_cm_types(&z5).unwrap()[0];
        let r = reflex(t).unwrap();
        let ps = primes_above(r.field(), 11).unwrap();
        let j = r.type_norm_ideal(&ps[0].ideal).unwrap();
        assert_eq!(j.norm(), &BigInt::from(121));
        let a = r.type_norm_ideal(&ps[1].ideal).unwrap();
        let prod = r.type_norm_ideal(&ps[0].ideal.mul(&ps[1].ideal).unwrap()).unwrap();
        assert_eq!(prod, j.mul(&a).unwrap());
    }
}
