//! Brute-force oracles shared by the integration and acceptance tests.

#![allow(dead_code)]

use cmorbit::field::NumberField;
use num_traits::{One, ToPrimitive, Zero};

/// Multiplication by each integral basis element, as `i64` matrices.
fn table(k: &NumberField) -> Vec<Vec<Vec<i64>>> {
    let n = k.degree();
    k.mul_table()
        .iter()
        .map(|m| (0..n).map(|i| (0..n).map(|j| m[(i, j)].to_i64().unwrap()).collect()).collect())
        .collect()
}

fn apply(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Membership in the span of upper triangular columns `cols[0..=top]` for a
/// vector supported on the first `top + 1` coordinates.
fn in_span(cols: &[Vec<i64>], top: usize, v: &[i64]) -> bool {
    let mut v = v.to_vec();
    for r in (0..=top).rev() {
        let d = cols[r][r];
        if v[r] % d != 0 {
            return false;
        }
        let q = v[r] / d;
        for i in 0..=r {
            v[i] -= q * cols[r][i];
        }
    }
    v.iter().all(|&x| x == 0)
}

fn ordered_factorisations(n: u64, parts: usize) -> Vec<Vec<u64>> {
    if parts == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for d in 1..=n {
        if n % d == 0 {
            for mut rest in ordered_factorisations(n / d, parts - 1) {
                rest.insert(0, d);
                out.push(rest);
            }
        }
    }
    out
}

fn support(v: &[i64]) -> usize {
    v.iter().rposition(|&x| x != 0).unwrap_or(0)
}

struct Search<'a> {
    table: &'a [Vec<Vec<i64>>],
    diag: Vec<i64>,
    cols: Vec<Vec<i64>>,
    /// Products of each fixed column with the basis, tagged by their support.
    products: Vec<Vec<(usize, Vec<i64>)>>,
    found: u64,
}

impl Search<'_> {
    /// Products that become decidable once column `j` is fixed.
    fn closed_through(&self, j: usize) -> bool {
        let fresh = self.products[j].iter().filter(|(s, _)| *s <= j);
        let older = self.products[..j].iter().flatten().filter(|(s, _)| *s == j);
        fresh.chain(older).all(|(_, v)| in_span(&self.cols, j, v))
    }

    fn column(&mut self, j: usize) {
        let n = self.diag.len();
        if j == n {
            self.found += 1;
            return;
        }
        let mut entries = vec![0i64; j];
        loop {
            let mut c = vec![0i64; n];
            c[..j].copy_from_slice(&entries);
            c[j] = self.diag[j];
            self.products[j] = self.table.iter().map(|m| apply(m, &c)).map(|v| (support(&v), v)).collect();
            self.cols[j] = c;
            if self.closed_through(j) {
                self.column(j + 1);
            }
            let mut i = 0;
            loop {
                if i == j {
                    return;
                }
                entries[i] += 1;
                if entries[i] < self.diag[i] {
                    break;
                }
                entries[i] = 0;
                i += 1;
            }
        }
    }
}

/// Number of sublattices of index `n` of the ring of integers that are closed
/// under multiplication, found by running over upper triangular Hermite forms.
pub fn hnf_ideal_count(k: &NumberField, n: u64) -> u64 {
    let one = k.one_coords();
    assert!(one[0].is_one() && one[1..].iter().all(Zero::is_zero));
    let t = table(k);
    let deg = k.degree();
    let mut total = 0;
    for diag in ordered_factorisations(n, deg) {
        // d_0 e_j lies in the ideal, so every d_j divides d_0
        if diag.iter().any(|d| diag[0] % d != 0) {
            continue;
        }
        let mut s = Search { table: &t, diag: diag.iter().map(|&d| d as i64).collect(), cols: vec![vec![0; deg]; deg], products: vec![Vec::new(); deg], found: 0 };
        s.column(0);
        total += s.found;
    }
    total
}
