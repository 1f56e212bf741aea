//! Finite abelian groups presented as `Z/d1 x ... x Z/dk` with `d1 | ... | dk`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::exact::arith::factor_u64;
use crate::IntMatrix;

/// Invariant factors of a finite abelian group, given the order of every
/// element. Only factors larger than one are returned, ascending.
pub fn invariants_from_orders(orders: &[u64]) -> Vec<u64> {
    let n = orders.len() as u64;
    if n <= 1 {
        return Vec::new();
    }
    // p-primary parts: cyclic factors of order >= p^k number log_p(N_k / N_{k-1})
    let mut primary: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for (p, e) in factor_u64(n) {
        let mut counts = vec![1u64];
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            counts.push(orders.iter().filter(|&&o| pk % o == 0).count() as u64);
        }
        let mut at_least = Vec::new();
        for k in 1..counts.len() {
            let ratio = counts[k] / counts[k - 1];
            let mut m = 0u32;
            let mut r = ratio;
            while r > 1 {
                r /= p;
                m += 1;
            }
            at_least.push(m);
        }
        // exponents of the cyclic p-factors, descending
        let mut exps = Vec::new();
        let top = at_least.first().copied().unwrap_or(0);
        for j in 0..top {
            let e = at_least.iter().filter(|&&c| c > j).count() as u32;
            exps.push(e);
        }
        primary.insert(p, exps);
    }
    let len = primary.values().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![1u64; len];
    for (p, exps) in &primary {
        for (j, &e) in exps.iter().enumerate() {
            out[len - 1 - j] *= p.pow(e);
        }
    }
    out.retain(|&d| d > 1);
    out
}

/// Reduce a coordinate vector into `[0, d_i)`.
pub fn normalize(v: &mut [BigInt], divisors: &[BigInt]) {
    for (x, d) in v.iter_mut().zip(divisors) {
        *x = x.mod_floor(d);
    }
}

/// Every element of the group, in lexicographic order of coordinates.
pub fn enumerate_elements(divisors: &[BigInt]) -> Vec<Vec<BigInt>> {
    let mut out = vec![Vec::new()];
    for d in divisors {
        let d = d.to_u64().expect("group too large to enumerate");
        let mut next = Vec::with_capacity(out.len() * d as usize);
        for v in &out {
            for i in 0..d {
                let mut w = v.clone();
                w.push(BigInt::from(i));
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// Order of an element.
pub fn element_order(v: &[BigInt], divisors: &[BigInt]) -> BigInt {
    v.iter().zip(divisors).fold(BigInt::one(), |acc, (x, d)| {
        let o = d / x.gcd(d);
        acc.lcm(&o)
    })
}

/// Order of the subgroup generated by the given elements.
pub fn subgroup_order(gens: &[Vec<BigInt>], divisors: &[BigInt]) -> BigInt {
    let k = divisors.len();
    if k == 0 {
        return BigInt::one();
    }
    let mut cols: Vec<Vec<BigInt>> = gens.to_vec();
    for (i, d) in divisors.iter().enumerate() {
        let mut c = vec![BigInt::zero(); k];
        c[i] = d.clone();
        cols.push(c);
    }
    let m = IntMatrix::from_cols(cols, k);
    let total: BigInt = divisors.iter().product();
    let h = m.hnf_modular(&total);
    let det: BigInt = (0..k).map(|i| h[(i, i)].clone()).product();
    total / det
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orders_of(divs: &[u64]) -> Vec<u64> {
        let d: Vec<BigInt> = divs.iter().map(|&x| BigInt::from(x)).collect();
        enumerate_elements(&d).iter().map(|v| element_order(v, &d).to_u64().unwrap()).collect()
    }

    #[test]
    fn recovers_invariants() {
        for divs in [vec![], vec![2], vec![2, 2], vec![3, 9], vec![2, 6, 12], vec![4, 20], vec![5]] {
            assert_eq!(invariants_from_orders(&orders_of(&divs)), divs);
        }
    }

    #[test]
    fn subgroups() {
        let d = vec![BigInt::from(2), BigInt::from(4)];
        assert_eq!(subgroup_order(&[vec![BigInt::from(0), BigInt::from(2)]], &d), BigInt::from(2));
        assert_eq!(subgroup_order(&[vec![BigInt::from(1), BigInt::from(1)]], &d), BigInt::from(4));
        assert_eq!(subgroup_order(&[], &d), BigInt::from(1));
        assert_eq!(
            subgroup_order(&[vec![BigInt::from(1), BigInt::from(0)], vec![BigInt::from(0), BigInt::from(1)]], &d),
            BigInt::from(8)
        );
    }
}
