//! Ideal class groups of CM fields by the relation method, with discrete
//! logarithms and principality certificates.

pub mod abelian;
pub mod analytic;
pub mod forms;
pub mod real;

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::arith::{factor_integer, mul_mod, primes_up_to};
use crate::exact::lattice::{lll_gram, short_vectors};
use crate::field::units::real_fundamental_unit;
use crate::field::{FieldElement, NumberField};
use crate::ideal::{primes_above, IntegralIdeal, PrimeIdeal};
use crate::IntMatrix;

pub use abelian::{element_order, enumerate_elements, subgroup_order};
pub use analytic::class_number_estimate;
pub use forms::{reduced_forms, reduced_forms_class_group, FormClassGroup, QuadForm};
pub use real::{real_quadratic, RealQuadratic};

/// Relative tolerance of the analytic class number bracket.
pub const CERTIFICATION_FACTOR: f64 = 1.4;

/// Tuning knobs for class group computations.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ClassGroupParams {
    /// Upper bound on prime ideal norms in the factor base; defaults to the
    /// Minkowski bound and may not be smaller.
    pub factor_base_bound: Option<u64>,
    pub seed: u64,
    /// Random relation attempts before giving up.
    pub max_attempts: usize,
    /// Principality searches cover `T2 <= multiplier * n * N^(2/n)`.
    pub principal_multiplier: u32,
}

impl Default for ClassGroupParams {
    fn default() -> Self {
        ClassGroupParams { factor_base_bound: None, seed: 0x5eed, max_attempts: 40_000, principal_multiplier: 12 }
    }
}

/// The smallest-norm ideal in a class.
#[derive(Clone, Debug)]
pub struct ClassRep {
    pub class: Vec<BigInt>,
    pub norm: BigInt,
    /// Exponents on the factor base primes.
    pub exponents: Vec<(usize, u32)>,
}

/// A class group `Z/d1 x ... x Z/dk` with explicit discrete logarithms.
#[derive(Clone, Debug)]
pub struct ClassGroup {
    field: NumberField,
    divisors: Vec<BigInt>,
    primes: Vec<PrimeIdeal>,
    small: usize,
    prime_classes: Vec<Vec<BigInt>>,
    by_p: Vec<(u64, Vec<usize>)>,
    bound: u64,
    minkowski: f64,
    estimate: f64,
    seed: u64,
    principal_multiplier: u32,
    reps: OnceLock<Vec<ClassRep>>,
}

/// Minkowski bound `(4/pi)^r2 n!/n^n sqrt|D|`.
pub fn minkowski_bound(k: &NumberField) -> f64 {
    let n = k.degree();
    let (_, r2) = k.signature();
    let d = k.discriminant().to_f64().unwrap().abs();
    let fact: f64 = (1..=n).map(|i| i as f64).product();
    (4.0 / std::f64::consts::PI).powi(r2 as i32) * fact / (n as f64).powi(n as i32) * d.sqrt()
}

/// Class group with factor base bound `bound`, which must be at least the
/// Minkowski bound.
pub fn class_group(k: &NumberField, factor_base_bound: u64) -> Result<ClassGroup> {
    ClassGroup::with_params(k, &ClassGroupParams { factor_base_bound: Some(factor_base_bound), ..Default::default() })
}

struct Tracker {
    rows: Vec<(usize, Vec<u64>)>,
}

const TRACK_PRIME: u64 = (1 << 61) - 1;

impl Tracker {
    fn reduce(v: &[i64]) -> Vec<u64> {
        v.iter().map(|&x| x.rem_euclid(TRACK_PRIME as i64) as u64).collect()
    }

    /// Adds `v` if it is independent of the rows so far (modulo a large prime).
    fn insert(&mut self, v: &[i64]) -> bool {
        let q = TRACK_PRIME;
        let mut r = Self::reduce(v);
        for (piv, row) in &self.rows {
            let c = r[*piv];
            if c != 0 {
                for (x, y) in r.iter_mut().zip(row) {
                    *x = (*x + q - mul_mod(c, *y, q)) % q;
                }
            }
        }
        let Some(piv) = r.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = crate::exact::arith::inv_mod(r[piv], q).unwrap();
        for x in r.iter_mut() {
            *x = mul_mod(*x, inv, q);
        }
        self.rows.push((piv, r));
        true
    }
}

fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

impl ClassGroup {
    /// Class group with the default factor base (the Minkowski bound).
    pub fn new(k: &NumberField) -> Result<Self> {
        Self::with_params(k, &ClassGroupParams::default())
    }

    pub fn with_params(k: &NumberField, params: &ClassGroupParams) -> Result<Self> {
        let n = k.degree();
        let minkowski = minkowski_bound(k);
        if n > 1 && !k.is_cm() {
            return Err(Error::NotCM);
        }
        let mink_floor = minkowski.floor() as u64;
        let bound = match params.factor_base_bound {
            Some(b) if (b as f64) < minkowski.floor() => {
                return Err(Error::DegenerateInput(format!(
                    "factor base bound {b} is below the Minkowski bound {minkowski:.2}"
                )))
            }
            Some(b) => b,
            None => mink_floor,
        };
        let mut primes = Vec::new();
        if n > 1 {
            for p in primes_up_to(bound) {
                for q in primes_above(k, p)? {
                    if q.norm_u64().is_some_and(|m| m <= bound) {
                        primes.push(q);
                    }
                }
            }
        }
        primes.sort_by_key(|q| q.norm_u64().unwrap());
        let mut by_p: Vec<(u64, Vec<usize>)> = Vec::new();
        for (i, q) in primes.iter().enumerate() {
            match by_p.iter_mut().find(|(p, _)| *p == q.p) {
                Some((_, v)) => v.push(i),
                None => by_p.push((q.p, vec![i])),
            }
        }
        by_p.sort();
        let mut cg = ClassGroup {
            field: k.clone(),
            divisors: Vec::new(),
            small: 0,
            prime_classes: vec![Vec::new(); primes.len()],
            by_p,
            primes,
            bound,
            minkowski,
            estimate: 1.0,
            seed: params.seed,
            principal_multiplier: params.principal_multiplier,
            reps: OnceLock::new(),
        };
        if cg.primes.is_empty() {
            return Ok(cg);
        }
        cg.estimate = class_number_estimate(k)?;
        let ln_d = k.discriminant().to_f64().unwrap().abs().ln();
        let small_bound = (bound as f64).min((ln_d * ln_d).max(50.0));
        cg.small = cg.primes.iter().take_while(|q| q.norm_u64().unwrap() as f64 <= small_bound).count().max(1);
        cg.build(params)?;
        Ok(cg)
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    /// Nontrivial invariant factors, ascending with `d1 | d2 | ...`.
    pub fn elementary_divisors(&self) -> &[BigInt] {
        &self.divisors
    }

    pub fn order(&self) -> BigInt {
        self.divisors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.divisors.is_empty()
    }

    /// All prime ideals of norm at most the factor base bound.
    pub fn factor_base(&self) -> &[PrimeIdeal] {
        &self.primes
    }

    pub fn factor_base_bound(&self) -> u64 {
        self.bound
    }

    pub fn minkowski(&self) -> f64 {
        self.minkowski
    }

    /// The analytic estimate the class number was certified against.
    pub fn analytic_estimate(&self) -> f64 {
        self.estimate
    }

    /// Class of the `i`-th factor base prime.
    pub fn class_of_prime(&self, i: usize) -> &[BigInt] {
        &self.prime_classes[i]
    }

    pub fn identity(&self) -> Vec<BigInt> {
        vec![BigInt::zero(); self.divisors.len()]
    }

    pub fn add(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        a.iter().zip(b).zip(&self.divisors).map(|((x, y), d)| (x + y).mod_floor(d)).collect()
    }

    pub fn neg(&self, a: &[BigInt]) -> Vec<BigInt> {
        a.iter().zip(&self.divisors).map(|(x, d)| (-x).mod_floor(d)).collect()
    }

    pub fn scale(&self, a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
        a.iter().zip(&self.divisors).map(|(x, d)| (x * m).mod_floor(d)).collect()
    }

    pub fn elements(&self) -> Vec<Vec<BigInt>> {
        enumerate_elements(&self.divisors)
    }

    pub fn element_order(&self, a: &[BigInt]) -> BigInt {
        element_order(a, &self.divisors)
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    /// Sparse exponent vector of `(a)` over the factor base, when `(a)` is
    /// supported on it.
    fn factor_element(&self, a: &[BigInt]) -> Option<Vec<(usize, i64)>> {
        let nm = self.field.norm_int(a).abs();
        if nm.is_zero() {
            return None;
        }
        self.factor_with(nm, |q| q.valuation_element(a) as i64)
    }

    fn factor_with<F: Fn(&PrimeIdeal) -> i64>(&self, mut nm: BigInt, val: F) -> Option<Vec<(usize, i64)>> {
        let mut out = Vec::new();
        for (p, idxs) in &self.by_p {
            if nm.is_one() {
                break;
            }
            let pb = BigInt::from(*p);
            let mut expect = 0u64;
            while nm.is_multiple_of(&pb) {
                nm /= &pb;
                expect += 1;
            }
            if expect == 0 {
                continue;
            }
            // a prime above p outside the factor base shows up as a deficit
            let mut got = 0u64;
            for &i in idxs {
                let v = val(&self.primes[i]);
                if v != 0 {
                    got += v as u64 * self.primes[i].f as u64;
                    out.push((i, v));
                }
            }
            if got != expect {
                return None;
            }
        }
        nm.is_one().then_some(out)
    }

    fn reduced_candidates(&self, ideal: &IntegralIdeal) -> Vec<Vec<BigInt>> {
        let cm = self.field.cm().expect("class groups need a CM field");
        let g = ideal.gram(&cm.t2_gram);
        let (_, t) = lll_gram(&g);
        let b = ideal.basis() * &t;
        let n = self.field.degree();
        let cols: Vec<Vec<BigInt>> = (0..n).map(|j| b.col(j)).collect();
        let mut out = cols.clone();
        if n >= 2 {
            let s: Vec<BigInt> = cols[0].iter().zip(&cols[1]).map(|(x, y)| x + y).collect();
            let d: Vec<BigInt> = cols[0].iter().zip(&cols[1]).map(|(x, y)| x - y).collect();
            out.push(s);
            out.push(d);
        }
        out
    }

    fn random_small_product(&self, rng: &mut ChaCha8Rng, parts: usize) -> (IntegralIdeal, Vec<(usize, i64)>) {
        let mut id = IntegralIdeal::unit(&self.field);
        let mut ex = Vec::new();
        for _ in 0..parts {
            let i = rng.gen_range(0..self.small);
            let e = rng.gen_range(1..=3u32);
            id = id.mul(&self.primes[i].ideal.pow(e as u64)).unwrap();
            ex.push((i, e as i64));
        }
        (id, ex)
    }

    fn build(&mut self, params: &ClassGroupParams) -> Result<()> {
        let r = self.small;
        let total = self.primes.len();
        let cm = self.field.cm().ok_or(Error::NotCM)?.clone();
        let mut tracker = Tracker { rows: Vec::new() };
        let mut rels: Vec<Vec<i64>> = Vec::new();
        let mut basis_rels: Vec<Vec<i64>> = Vec::new();
        let mut elim: Vec<Option<Vec<i64>>> = vec![None; total];
        for e in elim.iter_mut().take(r) {
            *e = Some(Vec::new());
        }

        let absorb = |sparse: Vec<(usize, i64)>,
                          rels: &mut Vec<Vec<i64>>,
                          basis_rels: &mut Vec<Vec<i64>>,
                          tracker: &mut Tracker,
                          elim: &mut Vec<Option<Vec<i64>>>| {
            let large: Vec<&(usize, i64)> = sparse.iter().filter(|(i, _)| *i >= r).collect();
            let mut v = vec![0i64; r];
            for &(i, e) in &sparse {
                if i < r {
                    v[i] += e;
                }
            }
            match large.as_slice() {
                [] => {
                    if v.iter().all(|&x| x == 0) {
                        return;
                    }
                    if tracker.insert(&v) {
                        basis_rels.push(v.clone());
                    }
                    rels.push(v);
                }
                [&(i, 1)] if elim[i].is_none() => {
                    elim[i] = Some(v.iter().map(|x| -x).collect());
                }
                _ => {}
            }
        };

        // small elements of the ring of integers
        let mut bound = (0..cm.t2_gram.rows()).map(|i| cm.t2_gram[(i, i)].clone()).max().unwrap();
        let want = 3 * r + 20;
        let mut seen_small = 0;
        for _ in 0..6 {
            let vs = match short_vectors(&cm.t2_gram, &bound, 20 * want) {
                Ok(vs) => vs,
                Err(_) => break,
            };
            seen_small = vs.len();
            if vs.len() >= want {
                for v in &vs {
                    if let Some(s) = self.factor_element(&v.coords) {
                        absorb(s, &mut rels, &mut basis_rels, &mut tracker, &mut elim);
                    }
                }
                break;
            }
            bound *= 4;
        }
        if seen_small < want {
            if let Ok(vs) = short_vectors(&cm.t2_gram, &bound, 20 * want) {
                for v in &vs {
                    if let Some(s) = self.factor_element(&v.coords) {
                        absorb(s, &mut rels, &mut basis_rels, &mut tracker, &mut elim);
                    }
                }
            }
        }

        let mut rng = self.rng(1);
        let mut h: Option<IntMatrix> = None;
        let mut pending_since_hnf: Vec<Vec<i64>> = Vec::new();
        let mut last_len = 0;
        let mut attempts = 0;
        loop {
            // fold new relations into the modular HNF
            if basis_rels.len() == r {
                let new: Vec<Vec<i64>> = rels[last_len..].to_vec();
                last_len = rels.len();
                pending_since_hnf.extend(new);
                if h.is_none() || !pending_since_hnf.is_empty() {
                    let hm = match &h {
                        None => {
                            let b = IntMatrix::from_cols(basis_rels.iter().map(|v| to_big(v)).collect(), r);
                            let d0 = b.det().abs();
                            let all = IntMatrix::from_cols(rels.iter().map(|v| to_big(v)).collect(), r);
                            all.hnf_modular(&d0)
                        }
                        Some(h0) => {
                            let d0: BigInt = (0..r).map(|i| h0[(i, i)].clone()).product();
                            let extra =
                                IntMatrix::from_cols(pending_since_hnf.iter().map(|v| to_big(v)).collect(), r);
                            h0.hcat(&extra).hnf_modular(&d0)
                        }
                    };
                    pending_since_hnf.clear();
                    h = Some(hm);
                }
                let hm = h.as_ref().unwrap();
                let det: BigInt = (0..r).map(|i| hm[(i, i)].clone()).product();
                let det_f = det.to_f64().unwrap_or(f64::INFINITY);
                if det_f < self.estimate / CERTIFICATION_FACTOR {
                    return Err(Error::RelationSaturationFailure(attempts));
                }
                let all_elim = elim.iter().all(Option::is_some);
                if det_f <= self.estimate * CERTIFICATION_FACTOR && all_elim {
                    break;
                }
            }
            if attempts >= params.max_attempts {
                return Err(Error::RelationSaturationFailure(attempts));
            }
            attempts += 1;
            // target a prime still needing elimination every other round
            let target = if attempts % 2 == 0 { elim.iter().position(Option::is_none) } else { None };
            let parts = rng.gen_range(1..=3usize);
            let (mut x, _) = self.random_small_product(&mut rng, parts);
            if let Some(t) = target {
                x = x.mul(&self.primes[t].ideal).unwrap();
            }
            for a in self.reduced_candidates(&x) {
                if let Some(s) = self.factor_element(&a) {
                    absorb(s, &mut rels, &mut basis_rels, &mut tracker, &mut elim);
                }
            }
        }

        let hm = h.expect("relation lattice is full rank");
        let smith = hm.smith();
        let nontrivial: Vec<usize> = (0..r).filter(|&i| !smith.diag[i].is_one()).collect();
        self.divisors = nontrivial.iter().map(|&i| smith.diag[i].clone()).collect();
        if nontrivial.is_empty() {
            self.prime_classes = vec![Vec::new(); total];
            return Ok(());
        }
        let proj = smith.left.select_rows(&nontrivial);
        let project = |v: &[BigInt]| -> Vec<BigInt> {
            let w = proj.mul_vec(v);
            w.iter().zip(&self.divisors).map(|(x, d)| x.mod_floor(d)).collect()
        };
        let mut classes = Vec::with_capacity(total);
        for (i, e) in elim.iter().enumerate() {
            let v = if i < r {
                let mut u = vec![BigInt::zero(); r];
                u[i] = BigInt::one();
                u
            } else {
                to_big(e.as_ref().unwrap())
            };
            classes.push(project(&v));
        }
        self.prime_classes = classes;
        Ok(())
    }

    fn classes_of_sparse(&self, sparse: &[(usize, i64)]) -> Vec<BigInt> {
        let mut acc = self.identity();
        for &(i, e) in sparse {
            let c = self.scale(&self.prime_classes[i], &BigInt::from(e));
            acc = self.add(&acc, &c);
        }
        acc
    }

    /// Class of an integral ideal.
    pub fn dlog(&self, ideal: &IntegralIdeal) -> Result<Vec<BigInt>> {
        if ideal.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        if self.divisors.is_empty() || ideal.is_unit() {
            return Ok(self.identity());
        }
        if let Some(s) = self.factor_with(ideal.norm().clone(), |q| q.valuation(ideal) as i64) {
            return Ok(self.classes_of_sparse(&s));
        }
        let mut rng = self.rng(ideal.norm().to_u64().unwrap_or(7) ^ 0xd1);
        for _ in 0..2000 {
            let parts = rng.gen_range(1..=2usize);
            let (x, xs) = self.random_small_product(&mut rng, parts);
            let j = ideal.mul(&x)?;
            for a in self.reduced_candidates(&j) {
                let na = self.field.norm_int(&a).abs();
                if na.is_zero() {
                    continue;
                }
                let (quot, rem) = na.div_rem(j.norm());
                if !rem.is_zero() {
                    continue;
                }
                // (a) = I X Y with Y smooth
                let y = self.factor_with(quot, |q| q.valuation_element(&a) as i64 - q.valuation(&j) as i64);
                if let Some(ys) = y {
                    let cx = self.classes_of_sparse(&xs);
                    let cy = self.classes_of_sparse(&ys);
                    return Ok(self.neg(&self.add(&cx, &cy)));
                }
            }
        }
        Err(Error::RelationSaturationFailure(2000))
    }

    /// A generator of `ideal` if it is principal, `None` otherwise.
    pub fn is_principal(&self, ideal: &IntegralIdeal) -> Result<Option<FieldElement>> {
        let k = &self.field;
        if ideal.is_unit() {
            return Ok(Some(FieldElement::from_int(k, 1)));
        }
        k.cm().ok_or(Error::NotCM)?;
        let n = k.degree();
        let nf = ideal.norm().to_f64().unwrap();
        let mut scale = self.principal_multiplier as f64;
        let grams: Vec<IntMatrix> = twisted_forms(k)?.iter().map(|g| ideal.gram(g)).collect();
        let mut class = None;
        for round in 0..5 {
            let b = (scale * n as f64 * nf.powf(2.0 / n as f64)).ceil();
            let bound = BigInt::from(b as u128);
            for g in &grams {
                match short_vectors(g, &bound, 200_000) {
                    Ok(vs) => {
                        for v in vs {
                            let a = ideal.basis().mul_vec(&v.coords);
                            if &k.norm_int(&a).abs() == ideal.norm() && &IntegralIdeal::principal(k, &a) == ideal {
                                return Ok(Some(k.element_int(&a)));
                            }
                        }
                    }
                    Err(_) => return Err(Error::InconclusiveBound),
                }
            }
            if round == 0 {
                let c = self.dlog(ideal)?;
                if c.iter().any(|x| !x.is_zero()) {
                    return Ok(None);
                }
                class = Some(c);
            }
            scale *= 4.0;
        }
        debug_assert!(class.is_some());
        Err(Error::InconclusiveBound)
    }

    /// The smallest-norm ideal of every class, found among all ideals of norm
    /// at most the factor base bound.
    pub fn class_representatives(&self) -> &[ClassRep] {
        self.reps.get_or_init(|| self.enumerate_reps())
    }

    fn enumerate_reps(&self) -> Vec<ClassRep> {
        let mut best: HashMap<Vec<BigInt>, ClassRep> = HashMap::new();
        best.insert(
            self.identity(),
            ClassRep { class: self.identity(), norm: BigInt::one(), exponents: Vec::new() },
        );
        let norms: Vec<u64> = self.primes.iter().map(|q| q.norm_u64().unwrap()).collect();
        let mut stack: Vec<(usize, u64, Vec<BigInt>, Vec<(usize, u32)>)> = vec![(0, 1, self.identity(), Vec::new())];
        while let Some((start, nm, cls, ex)) = stack.pop() {
            for i in start..self.primes.len() {
                let mut m = nm;
                let mut c = cls.clone();
                let mut e = 0u32;
                loop {
                    m = match m.checked_mul(norms[i]) {
                        Some(v) if v <= self.bound => v,
                        _ => break,
                    };
                    c = self.add(&c, &self.prime_classes[i]);
                    e += 1;
                    let mut ex2 = ex.clone();
                    ex2.push((i, e));
                    let nb = BigInt::from(m);
                    let better = best.get(&c).is_none_or(|r| nb < r.norm);
                    if better {
                        best.insert(c.clone(), ClassRep { class: c.clone(), norm: nb, exponents: ex2.clone() });
                    }
                    stack.push((i + 1, m, c.clone(), ex2));
                }
                if nm.saturating_mul(norms[i]) > self.bound {
                    break;
                }
            }
        }
        let mut out: Vec<ClassRep> = best.into_values().collect();
        out.sort_by(|a, b| a.class.cmp(&b.class));
        out
    }

    /// Smallest norm of an integral ideal in the class.
    pub fn minimal_norm_in_class(&self, class: &[BigInt]) -> Option<BigInt> {
        self.class_representatives().iter().find(|r| r.class == class).map(|r| r.norm.clone())
    }

    /// Largest over all classes of the smallest norm in the class.
    pub fn isogeny_statistic(&self) -> BigInt {
        self.class_representatives().iter().map(|r| r.norm.clone()).max().unwrap_or_else(BigInt::one)
    }

    /// The ideal with the given factor base exponents.
    pub fn ideal_from_exponents(&self, ex: &[(usize, u32)]) -> IntegralIdeal {
        ex.iter().fold(IntegralIdeal::unit(&self.field), |acc, &(i, e)| {
            acc.mul(&self.primes[i].ideal.pow(e as u64)).unwrap()
        })
    }

    /// A small ideal in the given class.
    pub fn representative(&self, class: &[BigInt]) -> Result<IntegralIdeal> {
        let r = self
            .class_representatives()
            .iter()
            .find(|r| r.class == class)
            .ok_or_else(|| Error::DegenerateInput("class has no small representative".into()))?;
        Ok(self.ideal_from_exponents(&r.exponents))
    }

    /// Minimal-norm ideals representing the standard generators `e_i`.
    pub fn generators(&self) -> Result<Vec<IntegralIdeal>> {
        (0..self.divisors.len())
            .map(|i| {
                let mut e = self.identity();
                e[i] = BigInt::one();
                self.representative(&e)
            })
            .collect()
    }
}

/// Gram matrices of `x -> Tr(v x conj(x))` on the integral basis for `v = 1`
/// and, when the fundamental unit of the real subfield is totally positive,
/// for `v` its inverse. Generators whose `a conj(a)` is that unit times a
/// rational are short for the second form.
fn twisted_forms(k: &NumberField) -> Result<Vec<IntMatrix>> {
    let cm = k.cm().ok_or(Error::NotCM)?;
    let mut out = vec![cm.t2_gram.clone()];
    let Some(eps) = real_fundamental_unit(k)? else {
        return Ok(out);
    };
    if eps.norm != 1 {
        return Ok(out);
    }
    let n = k.degree();
    let inv = k.element_int(&eps.coords).inv()?.integral_coords().ok_or(Error::RecognitionFailure)?;
    let mut g = IntMatrix::zeros(n, n);
    for i in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[i] = BigInt::one();
        let ve = k.mul_int(&inv, &e);
        for j in 0..n {
            g[(i, j)] = k.trace_int(&k.mul_int(&ve, &cm.conjugation.col(j)));
        }
    }
    out.push(g);
    Ok(out)
}

/// `h(K)` of a field where it is available: CM fields by relations, real
/// quadratic fields by forms, and `Q`.
pub fn class_number(k: &NumberField) -> Result<BigInt> {
    match k.degree() {
        1 => Ok(BigInt::one()),
        2 if !k.is_totally_imaginary() => {
            let d = k.discriminant().to_i64().ok_or_else(|| Error::Unsupported("discriminant size".into()))?;
            Ok(BigInt::from(real_quadratic(d)?.class_number))
        }
        _ => Ok(ClassGroup::new(k)?.order()),
    }
}

/// Factorization helper used by tests and reports.
pub fn norm_factors(n: &BigInt) -> Vec<(BigInt, u32)> {
    factor_integer(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Poly;
    use crate::field::{construct_field, quadratic_field};

    fn divs(k: &NumberField) -> Vec<i64> {
        ClassGroup::new(k).unwrap().elementary_divisors().iter().map(|d| d.to_i64().unwrap()).collect()
    }

    #[test]
    fn imaginary_quadratic() {
        assert_eq!(divs(&quadratic_field(-23).unwrap()), vec![3]);
        assert_eq!(divs(&quadratic_field(-20).unwrap()), vec![2]);
        assert_eq!(divs(&quadratic_field(-47).unwrap()), vec![5]);
        assert_eq!(divs(&quadratic_field(-4).unwrap()), Vec::<i64>::new());
        assert_eq!(divs(&quadratic_field(-84).unwrap()), vec![2, 2]);
        assert_eq!(divs(&quadratic_field(-3299).unwrap()), vec![3, 9]);
    }

    #[test]
    fn quartic() {
        let z5 = construct_field(&Poly::from_i64(&[1, 1, 1, 1, 1])).unwrap();
        assert!(divs(&z5).is_empty());
    }

    #[test]
    fn dlog_is_a_homomorphism() {
        let k = quadratic_field(-3299).unwrap();
        let cg = ClassGroup::new(&k).unwrap();
        let ps: Vec<_> = cg.factor_base().iter().take(6).cloned().collect();
        for a in &ps {
            for b in &ps {
                let ab = a.ideal.mul(&b.ideal).unwrap();
                let lhs = cg.dlog(&ab).unwrap();
                let rhs = cg.add(&cg.dlog(&a.ideal).unwrap(), &cg.dlog(&b.ideal).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
        // an ideal with a large prime factor goes through the randomized path
        let big = primes_above(&k, 1009).unwrap();
        if let Some(q) = big.first() {
            let c = cg.dlog(&q.ideal).unwrap();
            let c2 = cg.dlog(&q.ideal.mul(&ps[0].ideal).unwrap()).unwrap();
            assert_eq!(c2, cg.add(&c, &cg.dlog(&ps[0].ideal).unwrap()));
        }
    }

    #[test]
    fn principality() {
        let k = quadratic_field(-23).unwrap();
        let cg = ClassGroup::new(&k).unwrap();
        let p2 = &primes_above(&k, 2).unwrap()[0];
        assert!(cg.is_principal(&p2.ideal).unwrap().is_none());
        let cube = p2.ideal.pow(3);
        let g = cg.is_principal(&cube).unwrap().expect("cube of a class of order 3");
        assert_eq!(g.norm().abs(), num_rational::BigRational::from_integer(BigInt::from(8)));
        assert_eq!(cg.isogeny_statistic(), BigInt::from(2));
        assert_eq!(cg.generators().unwrap().len(), 1);
    }
}
