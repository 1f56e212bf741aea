//! The reciprocity map between class groups, the unit cokernel, the subgroup
//! of classes with norm-compatible generators, and the degree of the field of
//! moduli.

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::classgroup::abelian::{enumerate_elements, subgroup_order};
use crate::classgroup::{class_number, ClassGroup, ClassGroupParams};
use crate::cm::{reflex, CmType, ReflexPair};
use crate::error::{Error, Result};
use crate::field::units::{real_fundamental_unit, roots_of_unity, square_root, unit_index, RealUnit};
use crate::field::NumberField;
use crate::IntPolynomial;

/// Units of a CM field as seen from its real subfield.
#[derive(Clone, Debug)]
pub struct UnitGroupData {
    pub field: NumberField,
    pub real_subfield: NumberField,
    /// `None` when the real subfield is `Q`.
    pub fundamental_unit: Option<RealUnit>,
    pub torsion_generator: Vec<BigInt>,
    pub torsion_order: u64,
    pub unit_index: u32,
    /// Generator of the totally positive units of the real subfield.
    pub positive_generator: Option<Vec<BigInt>>,
    /// Generators of `{e conj(e)}` over units `e` of the field.
    pub norm_generators: Vec<Vec<BigInt>>,
    /// Elementary divisors of positive units modulo norms.
    pub cokernel: Vec<u64>,
}

impl UnitGroupData {
    pub fn cokernel_order(&self) -> u64 {
        self.cokernel.iter().product()
    }

    /// Whether a totally positive unit of the real subfield is of the form
    /// `e conj(e)`.
    pub fn is_norm(&self, u: &[BigInt]) -> Result<bool> {
        let k = &self.field;
        match &self.positive_generator {
            None => Ok(u == k.one_coords().as_slice()),
            Some(g) => {
                let e = exponent_of(k, u, g)?;
                Ok(e.rem_euclid(self.cokernel_order() as i64) == 0)
            }
        }
    }
}

fn conj(k: &NumberField, x: &[BigInt]) -> Result<Vec<BigInt>> {
    Ok(k.cm().ok_or(Error::NotCM)?.conjugation.mul_vec(x))
}

fn power(k: &NumberField, x: &[BigInt], e: u64) -> Vec<BigInt> {
    (0..e).fold(k.one_coords(), |acc, _| k.mul_int(&acc, x))
}

/// The integer `e` with `u = base^e`, for units of the real subfield.
pub fn exponent_of(k: &NumberField, u: &[BigInt], base: &[BigInt]) -> Result<i64> {
    let log_abs = |x: &[BigInt]| -> Result<f64> {
        let (re, im) = k.embed_int(x, 0, 128)?.to_f64();
        Ok(re.hypot(im).ln())
    };
    let lb = log_abs(base)?;
    if lb.abs() < 1e-9 {
        return Err(Error::DegenerateInput("base is a root of unity".into()));
    }
    let e = (log_abs(u)? / lb).round() as i64;
    let p = power(k, base, e.unsigned_abs());
    let ok = if e >= 0 { p == u } else { k.mul_int(&p, u) == k.one_coords() };
    if ok {
        Ok(e)
    } else {
        Err(Error::RecognitionFailure)
    }
}

fn torsion_generator(k: &NumberField, roots: &[Vec<BigInt>]) -> (Vec<BigInt>, u64) {
    let one = k.one_coords();
    let w = roots.len() as u64;
    for z in roots {
        let mut x = z.clone();
        let mut order = 1u64;
        while x != one {
            x = k.mul_int(&x, z);
            order += 1;
        }
        if order == w {
            return (z.clone(), w);
        }
    }
    (one, 1)
}

/// Positive units of the real subfield modulo norms of units of the field.
pub fn unit_cokernel(k: &NumberField) -> Result<UnitGroupData> {
    let cm = k.cm().ok_or(Error::NotCM)?;
    let roots = roots_of_unity(k)?;
    let (torsion_generator, torsion_order) = torsion_generator(k, &roots);
    let eps = real_fundamental_unit(k)?;
    let q = unit_index(k)?;
    let mut data = UnitGroupData {
        field: k.clone(),
        real_subfield: cm.real_subfield.clone(),
        fundamental_unit: eps.clone(),
        torsion_generator,
        torsion_order,
        unit_index: q,
        positive_generator: None,
        norm_generators: Vec::new(),
        cokernel: Vec::new(),
    };
    let Some(eps) = eps else {
        return Ok(data);
    };
    let e = &eps.coords;
    let positive = if eps.norm == -1 { k.mul_int(e, e) } else { e.clone() };
    let norm_gen = if q == 1 {
        k.mul_int(e, &conj(k, e)?)
    } else {
        let mut eta = None;
        for z in &roots {
            if let Some(r) = square_root(k, &k.mul_int(z, e))? {
                eta = Some(r);
                break;
            }
        }
        let eta = eta.ok_or(Error::RecognitionFailure)?;
        k.mul_int(&eta, &conj(k, &eta)?)
    };
    let c = exponent_of(k, &norm_gen, &positive)?;
    if c <= 0 {
        return Err(Error::RecognitionFailure);
    }
    let g = (k.degree() / 2) as u32;
    if (2u64.pow(g - 1) * torsion_order) % c as u64 != 0 {
        return Err(Error::RecognitionFailure);
    }
    data.positive_generator = Some(positive);
    data.norm_generators = vec![norm_gen];
    data.cokernel = if c > 1 { vec![c as u64] } else { Vec::new() };
    Ok(data)
}

/// The map from the class group of the reflex field to the class group of
/// the field induced by the type norm.
#[derive(Clone, Debug)]
pub struct ReciprocityMap {
    /// Column `j` is the image of the `j`-th generator of the domain.
    pub images: Vec<Vec<BigInt>>,
    pub domain: Vec<BigInt>,
    pub codomain: Vec<BigInt>,
    pub image_order: BigInt,
    pub kernel_order: BigInt,
}

impl ReciprocityMap {
    /// Image of a class given in domain coordinates.
    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.codomain.len()];
        for (xj, col) in x.iter().zip(&self.images) {
            for (o, c) in out.iter_mut().zip(col) {
                *o += xj * c;
            }
        }
        for (o, d) in out.iter_mut().zip(&self.codomain) {
            *o = o.mod_floor(d);
        }
        out
    }

    pub fn kernel(&self) -> Vec<Vec<BigInt>> {
        enumerate_elements(&self.domain).into_iter().filter(|x| self.apply(x).iter().all(Zero::is_zero)).collect()
    }
}

pub fn reciprocity_map(r: &ReflexPair, cl: &ClassGroup, cl_reflex: &ClassGroup) -> Result<ReciprocityMap> {
    if cl.field() != r.cm_type().field() || cl_reflex.field() != r.field() {
        return Err(Error::FieldMismatch);
    }
    let mut images = Vec::new();
    for g in cl_reflex.generators()? {
        let j = r.type_norm_ideal(&g)?;
        images.push(cl.dlog(&j)?);
    }
    let domain = cl_reflex.elementary_divisors().to_vec();
    let codomain = cl.elementary_divisors().to_vec();
    let image_order = subgroup_order(&images, &codomain);
    let total = cl_reflex.order();
    if !(&total % &image_order).is_zero() {
        return Err(Error::RecognitionFailure);
    }
    let kernel_order = total / &image_order;
    Ok(ReciprocityMap { images, domain, codomain, image_order, kernel_order })
}

/// A kernel class together with the generator of its type norm.
#[derive(Clone, Debug)]
pub struct Witness {
    pub class: Vec<BigInt>,
    /// Generator `a` of the type norm of the representative `I`.
    pub generator: Vec<BigInt>,
    /// `a conj(a) / N(I)`, a totally positive unit of the real subfield.
    pub unit: Vec<BigInt>,
    pub in_subgroup: bool,
}

/// Kernel classes whose witness unit is a norm of a unit.
#[derive(Clone, Debug)]
pub struct SubgroupH {
    pub witnesses: Vec<Witness>,
    pub order: BigInt,
}

impl SubgroupH {
    pub fn elements(&self) -> Vec<Vec<BigInt>> {
        self.witnesses.iter().filter(|w| w.in_subgroup).map(|w| w.class.clone()).collect()
    }
}

fn totally_positive(k: &NumberField, x: &[BigInt]) -> Result<bool> {
    for s in 0..k.degree() {
        let z = k.embed_int(x, s, 128)?;
        if !z.im.contains_zero() || !z.re.lower().is_positive() {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn subgroup_h(
    r: &ReflexPair,
    cl: &ClassGroup,
    cl_reflex: &ClassGroup,
    map: &ReciprocityMap,
    units: &UnitGroupData,
) -> Result<SubgroupH> {
    let k = r.cm_type().field();
    let mut witnesses = Vec::new();
    for class in map.kernel() {
        let i = cl_reflex.representative(&class)?;
        let j = r.type_norm_ideal(&i)?;
        let a = cl.is_principal(&j)?.ok_or(Error::RecognitionFailure)?;
        let a = a.integral_coords().ok_or(Error::RecognitionFailure)?;
        let aa = k.mul_int(&a, &conj(k, &a)?);
        let n = i.norm();
        if aa.iter().any(|c| !(c % n).is_zero()) {
            return Err(Error::RecognitionFailure);
        }
        let u: Vec<BigInt> = aa.iter().map(|c| c / n).collect();
        if conj(k, &u)? != u || !k.norm_int(&u).abs().is_one() || !totally_positive(k, &u)? {
            return Err(Error::RecognitionFailure);
        }
        let in_subgroup = units.is_norm(&u)?;
        witnesses.push(Witness { class, generator: a, unit: u, in_subgroup });
    }
    let order = BigInt::from(witnesses.iter().filter(|w| w.in_subgroup).count());
    let index = &map.kernel_order / &order;
    if !(&map.kernel_order % &order).is_zero() || units.cokernel_order() % index.to_u64().unwrap_or(0).max(1) != 0 {
        return Err(Error::RecognitionFailure);
    }
    Ok(SubgroupH { witnesses, order })
}

/// Everything computed for one CM type.
#[derive(Clone, Debug)]
pub struct OrbitAnalysis {
    pub reflex: ReflexPair,
    pub class_group: ClassGroup,
    pub reflex_class_group: ClassGroup,
    pub real_class_number: BigInt,
    pub units: UnitGroupData,
    pub map: ReciprocityMap,
    pub subgroup: SubgroupH,
}

impl OrbitAnalysis {
    /// `|Cl(E*)| / |H|`.
    pub fn moduli_degree(&self) -> BigInt {
        self.reflex_class_group.order() / &self.subgroup.order
    }

    pub fn brauer_siegel_ratio(&self) -> BigRational {
        BigRational::new(self.class_group.order(), self.real_class_number.clone())
    }
}

/// Run the whole pipeline for one CM type.
pub fn analyze(t: &CmType, params: &ClassGroupParams) -> Result<OrbitAnalysis> {
    let k = t.field();
    let r = reflex(t)?;
    let cl = ClassGroup::with_params(k, params)?;
    analyze_with(r, cl, params)
}

/// As [`analyze`], reusing a class group of the field.
pub fn analyze_with(r: ReflexPair, cl: ClassGroup, params: &ClassGroupParams) -> Result<OrbitAnalysis> {
    let k = r.cm_type().field().clone();
    let cl_reflex = if r.field() == &k { cl.clone() } else { ClassGroup::with_params(r.field(), params)? };
    let real_class_number = class_number(&k.cm().ok_or(Error::NotCM)?.real_subfield)?;
    let units = unit_cokernel(&k)?;
    let map = reciprocity_map(&r, &cl, &cl_reflex)?;
    let subgroup = subgroup_h(&r, &cl, &cl_reflex, &map, &units)?;
    let analysis = OrbitAnalysis { reflex: r, class_group: cl, reflex_class_group: cl_reflex, real_class_number, units, map, subgroup };
    let deg = analysis.moduli_degree();
    let coker = BigInt::from(analysis.units.cokernel_order());
    if deg < analysis.map.image_order || deg > &analysis.map.image_order * coker {
        return Err(Error::RecognitionFailure);
    }
    Ok(analysis)
}

pub fn moduli_degree(t: &CmType, params: &ClassGroupParams) -> Result<BigInt> {
    Ok(analyze(t, params)?.moduli_degree())
}

/// `|Cl(E)| / |Cl(E0)|`.
pub fn brauer_siegel_ratio(k: &NumberField) -> Result<BigRational> {
    let cm = k.cm().ok_or(Error::NotCM)?;
    Ok(BigRational::new(class_number(k)?, class_number(&cm.real_subfield)?))
}

/// A serializable summary of one CM type.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub polynomial: Vec<i64>,
    pub discriminant: i64,
    pub real_discriminant: i64,
    pub reflex_polynomial: Vec<i64>,
    pub class_number: u64,
    pub real_class_number: u64,
    pub reflex_class_number: u64,
    pub cm_type: u32,
    pub primitive: bool,
    pub kernel: u64,
    pub image: u64,
    pub subgroup: u64,
    pub cokernel: u64,
    pub moduli_degree: u64,
    pub isogeny_statistic: u64,
    pub started_unix: u64,
    pub elapsed_ms: u64,
    pub params: ClassGroupParams,
}

fn small(n: &BigInt) -> Result<i64> {
    n.to_i64().ok_or_else(|| Error::Unsupported(format!("{n} does not fit in 64 bits")))
}

fn coeffs(f: &IntPolynomial) -> Result<Vec<i64>> {
    f.coeffs().iter().map(small).collect()
}

impl OrbitAnalysis {
    pub fn report(&self, started_unix: u64, elapsed_ms: u64, params: &ClassGroupParams) -> Result<OrbitReport> {
        let t = self.reflex.cm_type();
        let k = t.field();
        let cm = k.cm().ok_or(Error::NotCM)?;
        let u = |n: &BigInt| small(n).map(|v| v as u64);
        Ok(OrbitReport {
            polynomial: coeffs(k.poly())?,
            discriminant: small(k.discriminant())?,
            real_discriminant: small(cm.real_subfield.discriminant())?,
            reflex_polynomial: coeffs(self.reflex.field().poly())?,
            class_number: u(&self.class_group.order())?,
            real_class_number: u(&self.real_class_number)?,
            reflex_class_number: u(&self.reflex_class_group.order())?,
            cm_type: t.mask(),
            primitive: t.is_primitive(),
            kernel: u(&self.map.kernel_order)?,
            image: u(&self.map.image_order)?,
            subgroup: u(&self.subgroup.order)?,
            cokernel: self.units.cokernel_order(),
            moduli_degree: u(&self.moduli_degree())?,
            isogeny_statistic: u(&self.class_group.isogeny_statistic())?,
            started_unix,
            elapsed_ms,
            params: params.clone(),
        })
    }
}

/// Analyse one CM type and summarise it.
pub fn orbit_report(t: &CmType, params: &ClassGroupParams) -> Result<OrbitReport> {
    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    let a = analyze(t, params)?;
    a.report(started_unix, clock.elapsed().as_millis() as u64, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cm::enumerate_cm_types;
    use crate::exact::Poly;
    use crate::field::{construct_field, quadratic_field};

    fn field(c: &[i64]) -> NumberField {
        construct_field(&Poly::from_i64(c)).unwrap()
    }

    #[test]
    fn unit_cokernels() {
        let z5 = unit_cokernel(&field(&[1, 1, 1, 1, 1])).unwrap();
        assert_eq!(z5.fundamental_unit.as_ref().unwrap().norm, -1);
        assert_eq!(z5.cokernel_order(), 1);
        let z12 = unit_cokernel(&field(&[1, 0, -1, 0, 1])).unwrap();
        assert_eq!(z12.unit_index, 2);
        assert_eq!(z12.cokernel_order(), 1);
        // Q(sqrt -1, sqrt 3) has unit index 2; Q(sqrt -7, sqrt 3) has 1 and N(2 + sqrt 3) = 1
        let k = field(&[100, 0, 8, 0, 1]);
        let d = unit_cokernel(&k).unwrap();
        assert_eq!(d.unit_index, 1);
        assert_eq!(d.cokernel, vec![2]);
        assert!(unit_cokernel(&quadratic_field(-23).unwrap()).unwrap().cokernel.is_empty());
    }

    #[test]
    fn quadratic_degrees_are_class_numbers() {
        for (d, h) in [(-23i64, 3u64), (-4, 1), (-3, 1), (-47, 5), (-84, 4), (-3299, 27)] {
            let k = quadratic_field(d).unwrap();
            for t in enumerate_cm_types(&k).unwrap() {
                let a = analyze(&t, &ClassGroupParams::default()).unwrap();
                assert_eq!(a.map.kernel_order, BigInt::one());
                assert_eq!(a.moduli_degree(), BigInt::from(h), "D = {d}");
            }
        }
    }

    #[test]
    fn cyclotomic_degree_is_one() {
        let k = field(&[1, 1, 1, 1, 1]);
        for t in enumerate_cm_types(&k).unwrap() {
            assert_eq!(moduli_degree(&t, &ClassGroupParams::default()).unwrap(), BigInt::one());
        }
        assert_eq!(brauer_siegel_ratio(&k).unwrap(), BigRational::one());
    }
}
