//! Galois closures of fields of degree at most four, as permutation groups on
//! the roots of the defining polynomial.

use std::collections::BTreeSet;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exact::roots::poly_from_roots;
use crate::exact::{ComplexBall, RootSet};
use crate::field::NumberField;
use crate::IntPolynomial;

/// A permutation of root indices; `p[i]` is the image of root `i`.
pub type Perm = Vec<usize>;

const PRECISIONS: [u32; 4] = [128, 256, 512, 1024];
const WEIGHTS: [[i64; 4]; 4] = [[1, 2, 5, 11], [1, 3, 7, 17], [2, 5, 13, 29], [1, 4, 9, 23]];

/// Outcome of rounding ball coefficients to integers.
pub(crate) enum Rounded {
    Integral(IntPolynomial),
    NotIntegral,
    Imprecise,
}

pub(crate) fn round_coefficients(c: &[ComplexBall]) -> Rounded {
    let mut out = Vec::with_capacity(c.len());
    for v in c {
        if v.re.rad_f64() >= 0.25 || v.im.rad_f64() >= 0.25 {
            return Rounded::Imprecise;
        }
        if !v.im.contains_zero() {
            return Rounded::NotIntegral;
        }
        match v.re.unique_integer() {
            Some(x) => out.push(x),
            None => return Rounded::NotIntegral,
        }
    }
    Rounded::Integral(IntPolynomial::new(out))
}

/// Composition `a ∘ b`.
pub fn compose(a: &[usize], b: &[usize]) -> Perm {
    b.iter().map(|&i| a[i]).collect()
}

pub fn inverse(a: &[usize]) -> Perm {
    let mut out = vec![0; a.len()];
    for (i, &j) in a.iter().enumerate() {
        out[j] = i;
    }
    out
}

fn identity(n: usize) -> Perm {
    (0..n).collect()
}

fn all_perms(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut p = identity(n);
    fn rec(k: usize, p: &mut Perm, out: &mut Vec<Perm>) {
        if k == p.len() {
            out.push(p.clone());
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            rec(k + 1, p, out);
            p.swap(k, i);
        }
    }
    rec(0, &mut p, &mut out);
    out.sort();
    out
}

/// Closure of a set of permutations under composition.
fn generate(gens: &[Perm], n: usize) -> BTreeSet<Perm> {
    let mut group = BTreeSet::new();
    group.insert(identity(n));
    let mut frontier = vec![identity(n)];
    while let Some(g) = frontier.pop() {
        for s in gens {
            let h = compose(s, &g);
            if group.insert(h.clone()) {
                frontier.push(h);
            }
        }
    }
    group
}

fn is_transitive(group: &BTreeSet<Perm>, n: usize) -> bool {
    let orbit: BTreeSet<usize> = group.iter().map(|g| g[0]).collect();
    orbit.len() == n
}

/// Transitive subgroups of the symmetric group, ordered by size.
fn transitive_subgroups(n: usize) -> Vec<Vec<Perm>> {
    let perms = all_perms(n);
    let mut seen = BTreeSet::new();
    for a in &perms {
        for b in &perms {
            let g = generate(&[a.clone(), b.clone()], n);
            if is_transitive(&g, n) {
                seen.insert(g.into_iter().collect::<Vec<_>>());
            }
        }
    }
    let mut out: Vec<Vec<Perm>> = seen.into_iter().collect();
    out.sort_by_key(|g| g.len());
    out
}

fn weighted_sum(roots: &[ComplexBall], weights: &[i64], p: &[usize], prec: u32) -> ComplexBall {
    let mut acc = ComplexBall::zero(prec);
    for (i, &w) in weights.iter().enumerate() {
        let c = ComplexBall::from_f64(w as f64, 0.0, prec);
        acc = &acc + &(&c * &roots[p[i]]);
    }
    acc
}

fn pairwise_disjoint(vals: &[ComplexBall]) -> bool {
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            if vals[i].overlaps(&vals[j]) {
                return false;
            }
        }
    }
    true
}

/// Galois closure of a field, realised through the action of its group on
/// the roots of the defining polynomial.
#[derive(Clone, Debug)]
pub struct GaloisClosure {
    field: NumberField,
    roots: RootSet,
    group: Vec<Perm>,
    table: Vec<Vec<usize>>,
    conjugation: usize,
    polynomial: IntPolynomial,
}

impl GaloisClosure {
    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn roots(&self) -> &RootSet {
        &self.roots
    }

    /// Group elements as permutations of root indices; element 0 is the identity.
    pub fn elements(&self) -> &[Perm] {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.group.len()
    }

    /// Degree of the closure over `Q`.
    pub fn degree(&self) -> usize {
        self.group.len()
    }

    /// `table[a][b]` is the index of `a ∘ b`.
    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.table[a].iter().position(|&c| c == 0).expect("group element has an inverse")
    }

    /// Index of complex conjugation.
    pub fn conjugation(&self) -> usize {
        self.conjugation
    }

    /// A defining polynomial of the closure.
    pub fn polynomial(&self) -> &IntPolynomial {
        &self.polynomial
    }

    pub fn index_of(&self, p: &[usize]) -> Option<usize> {
        self.group.iter().position(|g| g == p)
    }

    /// Embedding of the field into the closure realised by element `g`:
    /// the root index that the generator is sent to.
    pub fn field_embedding(&self, g: usize) -> usize {
        self.group[g][0]
    }

    /// Left multiplication by `g` as a permutation of the closure's embeddings.
    pub fn embedding_permutation(&self, g: usize) -> Perm {
        self.table[g].clone()
    }

    /// Elements fixing the generator of the field.
    pub fn field_stabilizer(&self) -> Vec<usize> {
        (0..self.group.len()).filter(|&g| self.group[g][0] == 0).collect()
    }

    /// Every subgroup, as sorted lists of element indices.
    pub fn subgroups(&self) -> Vec<Vec<usize>> {
        let m = self.group.len();
        let mut seen = BTreeSet::new();
        for a in 0..m {
            for b in a..m {
                seen.insert(self.generated(&[a, b]));
            }
        }
        let mut out: Vec<Vec<usize>> = seen.into_iter().collect();
        out.sort_by_key(|s| (s.len(), s.clone()));
        out
    }

    /// Subgroup generated by the given elements.
    pub fn generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut set = BTreeSet::new();
        set.insert(0usize);
        let mut frontier = vec![0usize];
        while let Some(g) = frontier.pop() {
            for &s in gens {
                let h = self.table[s][g];
                if set.insert(h) {
                    frontier.push(h);
                }
            }
        }
        set.into_iter().collect()
    }

    fn check_table(&self) -> bool {
        let m = self.group.len();
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]] {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Galois closure of a field of degree at most four.
pub fn galois_closure(k: &NumberField) -> Result<GaloisClosure> {
    let n = k.degree();
    if n > 4 {
        return Err(Error::ClosureDegreeUnsupported(n));
    }
    let mut last = Error::PrecisionExhausted(0);
    for prec in PRECISIONS {
        let size = k.poly().coeffs().iter().map(BigInt::bits).max().unwrap_or(1) as u32;
        match closure_at(k, prec + 4 * size) {
            Err(Error::PrecisionExhausted(p)) => last = Error::PrecisionExhausted(p),
            other => return other,
        }
    }
    Err(last)
}

fn closure_at(k: &NumberField, prec: u32) -> Result<GaloisClosure> {
    let n = k.degree();
    let roots = k.roots(prec)?;
    let perms = all_perms(n);
    let weights = WEIGHTS
        .iter()
        .map(|w| &w[..n])
        .find(|w| {
            let vals: Vec<ComplexBall> = perms.iter().map(|p| weighted_sum(&roots.roots, w, p, prec)).collect();
            pairwise_disjoint(&vals)
        })
        .ok_or(Error::PrecisionExhausted(prec as u64))?;
    let mut found: Option<(Vec<Perm>, IntPolynomial)> = None;
    let mut found_size = 0;
    for cand in transitive_subgroups(n) {
        if found.is_some() && cand.len() > found_size {
            break;
        }
        let vals: Vec<ComplexBall> = cand.iter().map(|p| weighted_sum(&roots.roots, weights, p, prec)).collect();
        let refs: Vec<&ComplexBall> = vals.iter().collect();
        match round_coefficients(&poly_from_roots(&refs, prec)) {
            Rounded::Imprecise => return Err(Error::PrecisionExhausted(prec as u64)),
            Rounded::NotIntegral => {}
            Rounded::Integral(f) => {
                if found.is_some() {
                    return Err(Error::RecognitionFailure);
                }
                found_size = cand.len();
                found = Some((cand, f));
            }
        }
    }
    let (group, polynomial) = found.ok_or(Error::RecognitionFailure)?;
    if group.len() > 8 {
        return Err(Error::ClosureDegreeUnsupported(group.len()));
    }
    let mut group = group;
    let id = identity(n);
    group.sort_by_key(|g| (g != &id, g.clone()));
    let index = |p: &Perm| group.iter().position(|g| g == p);
    let mut table = Vec::with_capacity(group.len());
    for a in &group {
        let mut row = Vec::with_capacity(group.len());
        for b in &group {
            row.push(index(&compose(a, b)).ok_or(Error::RecognitionFailure)?);
        }
        table.push(row);
    }
    let conjugation = index(&roots.conj).ok_or(Error::RecognitionFailure)?;
    let gc = GaloisClosure { field: k.clone(), roots, group, table, conjugation, polynomial };
    if !gc.check_table() {
        return Err(Error::RecognitionFailure);
    }
    Ok(gc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Poly;
    use crate::field::construct_field;

    fn closure(c: &[i64]) -> GaloisClosure {
        galois_closure(&construct_field(&Poly::from_i64(c)).unwrap()).unwrap()
    }

    fn is_cyclic(g: &GaloisClosure) -> bool {
        (0..g.order()).any(|a| g.generated(&[a]).len() == g.order())
    }

    #[test]
    fn closure_orders() {
        assert_eq!(closure(&[1, 0, 1]).order(), 2);
        let z5 = closure(&[1, 1, 1, 1, 1]);
        assert_eq!(z5.order(), 4);
        assert!(is_cyclic(&z5));
        let bq = closure(&[1, 0, 0, 0, 1]);
        assert_eq!(bq.order(), 4);
        assert!(!is_cyclic(&bq));
        let d4 = closure(&[2, 0, 2, 0, 1]);
        assert_eq!(d4.order(), 8);
        assert_eq!(d4.polynomial().degree(), 8);
        assert_eq!(d4.subgroups().len(), 10);
    }

    #[test]
    fn conjugation_is_an_involution() {
        let g = closure(&[2, 0, 2, 0, 1]);
        let c = g.conjugation();
        assert_ne!(c, 0);
        assert_eq!(g.mul(c, c), 0);
    }
}
