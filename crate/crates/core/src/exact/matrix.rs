use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::scalar::{ext_gcd, IntScalar};

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[T]> = (0..self.rows)
            .map(|i| &self.data[i * self.cols..(i + 1) * self.cols])
            .collect();
        f.debug_list().entries(rows).finish()
    }
}

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_cols(cols: Vec<Vec<T>>, nrows: usize) -> Self {
        let mut m = Self::zeros(nrows, cols.len());
        for (j, c) in cols.into_iter().enumerate() {
            assert_eq!(c.len(), nrows, "column length mismatch");
            for (i, v) in c.into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn to_cols(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// Columns `range` as a new matrix.
    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, idx.len());
        for (jj, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                m[(i, jj)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Matrix::from_rows(idx.iter().map(|&i| self.row(i)).collect())
    }

    /// Horizontal concatenation.
    pub fn hcat(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn diagonal(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }
}

impl<T: Clone + Zero + Add<Output = T> + Mul<Output = T>> Matrix<T> {
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut s = T::zero();
                for (j, vj) in v.iter().enumerate() {
                    s = s + self[(i, j)].clone() * vj.clone();
                }
                s
            })
            .collect()
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Clone + Zero + Add<Output = T> + Mul<Output = T>> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = Matrix::<T>::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out[(i, j)].clone() + a.clone() * rhs[(k, j)].clone();
                    out[(i, j)] = v;
                }
            }
        }
        out
    }
}

impl<T: Clone + Zero + Add<Output = T>> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
}

impl<T: Clone + Zero + Sub<Output = T>> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }
}

impl<T: Clone + Neg<Output = T>> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a.clone()).collect(),
        }
    }
}

/// Smith normal form with transforms: `left * m * right == diag`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith<T> {
    pub diag: Vec<T>,
    pub left: Matrix<T>,
    pub right: Matrix<T>,
}

impl<T: IntScalar> Matrix<T> {
    fn col_combine(&mut self, k: usize, j: usize, a: &T, b: &T, c: &T, d: &T) {
        // (col_k, col_j) <- (a col_k + b col_j, c col_k + d col_j)
        for i in 0..self.rows {
            let xk = self[(i, k)].clone();
            let xj = self[(i, j)].clone();
            self[(i, k)] = a.clone() * xk.clone() + b.clone() * xj.clone();
            self[(i, j)] = c.clone() * xk + d.clone() * xj;
        }
    }

    fn row_combine(&mut self, k: usize, j: usize, a: &T, b: &T, c: &T, d: &T) {
        for i in 0..self.cols {
            let xk = self[(k, i)].clone();
            let xj = self[(j, i)].clone();
            self[(k, i)] = a.clone() * xk.clone() + b.clone() * xj.clone();
            self[(j, i)] = c.clone() * xk + d.clone() * xj;
        }
    }

    fn col_axpy(&mut self, dst: usize, q: &T, src: usize) {
        // col_dst -= q * col_src
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self[(i, dst)].clone() - q.clone() * self[(i, src)].clone();
            self[(i, dst)] = v;
        }
    }

    fn row_axpy(&mut self, dst: usize, q: &T, src: usize) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self[(dst, j)].clone() - q.clone() * self[(src, j)].clone();
            self[(dst, j)] = v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -self[(i, j)].clone();
            self[(i, j)] = v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self[(i, j)].clone();
            self[(i, j)] = v;
        }
    }

    /// Column-style Hermite normal form.
    ///
    /// Returns `(h, u)` with `self * u == h`, `u` unimodular. Nonzero columns of
    /// `h` sit on the right; each pivot row has a positive pivot, zeros to its
    /// left, and entries to its right reduced into `[0, pivot)`.
    pub fn hnf_with_transform(&self) -> (Matrix<T>, Matrix<T>) {
        let mut h = self.clone();
        let mut u = Matrix::identity(self.cols);
        let n = self.cols;
        let mut k = n;
        for i in (0..self.rows).rev() {
            if k == 0 {
                break;
            }
            let piv = k - 1;
            for j in (0..piv).rev() {
                if h[(i, j)].is_zero() {
                    continue;
                }
                if h[(i, piv)].is_zero() {
                    h.swap_cols(j, piv);
                    u.swap_cols(j, piv);
                    continue;
                }
                let a = h[(i, piv)].clone();
                let b = h[(i, j)].clone();
                let (g, x, y) = ext_gcd(&a, &b);
                let ag = a / g.clone();
                let bg = -(b / g);
                h.col_combine(piv, j, &x, &y, &bg, &ag);
                u.col_combine(piv, j, &x, &y, &bg, &ag);
            }
            if h[(i, piv)].is_zero() {
                continue;
            }
            if h[(i, piv)].is_negative() {
                h.negate_col(piv);
                u.negate_col(piv);
            }
            let p = h[(i, piv)].clone();
            for j in piv + 1..n {
                let q = h[(i, j)].div_floor(&p);
                h.col_axpy(j, &q, piv);
                u.col_axpy(j, &q, piv);
            }
            k -= 1;
        }
        (h, u)
    }

    pub fn hnf(&self) -> Matrix<T> {
        self.hnf_with_transform().0
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let h = self.hnf();
        (0..h.cols).filter(|&j| (0..h.rows).any(|i| !h[(i, j)].is_zero())).count()
    }

    /// HNF of a full-rank lattice whose determinant divides `modulus`.
    ///
    /// The columns of `self` (m rows, any number of columns) must span a
    /// rank-m lattice `L` whose determinant divides `modulus`. Returns the m×m HNF with
    /// the same conventions as [`Matrix::hnf`].
    pub fn hnf_modular(&self, modulus: &T) -> Matrix<T> {
        let m = self.rows;
        assert!(modulus.is_positive(), "modulus must be positive");
        let mut a = self.hcat(&Matrix::diagonal(&vec![modulus.clone(); m]));
        let reduce_col = |a: &mut Matrix<T>, j: usize, r: &T| {
            for i in 0..a.rows {
                let v = a[(i, j)].mod_floor(r);
                a[(i, j)] = v;
            }
        };
        for j in 0..a.cols {
            reduce_col(&mut a, j, modulus);
        }
        let mut w = Matrix::zeros(m, m);
        let mut r = modulus.clone();
        let mut k = a.cols;
        for i in (0..m).rev() {
            let piv = k - 1;
            if a[(i, piv)].is_zero() {
                a[(i, piv)] = r.clone();
            }
            for j in (0..piv).rev() {
                if a[(i, j)].is_zero() {
                    continue;
                }
                let x0 = a[(i, piv)].clone();
                let y0 = a[(i, j)].clone();
                let (g, x, y) = ext_gcd(&x0, &y0);
                let ag = x0 / g.clone();
                let bg = -(y0 / g);
                a.col_combine(piv, j, &x, &y, &bg, &ag);
                reduce_col(&mut a, piv, &r);
                reduce_col(&mut a, j, &r);
            }
            let (d, u, _) = ext_gcd(&a[(i, piv)], &r);
            for l in 0..=i {
                w[(l, i)] = (u.clone() * a[(l, piv)].clone()).mod_floor(&r);
            }
            if w[(i, i)].is_zero() {
                w[(i, i)] = r.clone();
            }
            let p = w[(i, i)].clone();
            for j in i + 1..m {
                let q = w[(i, j)].div_floor(&p);
                w.col_axpy(j, &q, i);
            }
            r = r / d;
            k -= 1;
            if i > 0 && a[(i - 1, k - 1)].is_zero() {
                a[(i - 1, k - 1)] = r.clone();
            }
        }
        w
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn det(&self) -> T {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return T::one();
        }
        let mut a = self.clone();
        let mut sign = T::one();
        let mut prev = T::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return T::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a[(i, j)].clone() * a[(k, k)].clone()
                        - a[(i, k)].clone() * a[(k, j)].clone())
                        / prev.clone();
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }

    /// Smith normal form with unimodular transforms.
    pub fn smith(&self) -> Smith<T> {
        let (m, n) = (self.rows, self.cols);
        let mut a = self.clone();
        let mut left = Matrix::identity(m);
        let mut right = Matrix::identity(n);
        let r = m.min(n);
        for t in 0..r {
            // bring the smallest nonzero entry to the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if !a[(i, j)].is_zero()
                        && best.is_none_or(|(bi, bj)| a[(i, j)].abs() < a[(bi, bj)].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            a.swap_rows(t, bi);
            left.swap_rows(t, bi);
            a.swap_cols(t, bj);
            right.swap_cols(t, bj);
            loop {
                let mut dirty = false;
                for i in t + 1..m {
                    if a[(i, t)].is_zero() {
                        continue;
                    }
                    if a[(i, t)].is_multiple_of(&a[(t, t)]) {
                        let q = a[(i, t)].clone() / a[(t, t)].clone();
                        a.row_axpy(i, &q, t);
                        left.row_axpy(i, &q, t);
                        continue;
                    }
                    let (g, x, y) = ext_gcd(&a[(t, t)], &a[(i, t)]);
                    let p = a[(t, t)].clone() / g.clone();
                    let q = a[(i, t)].clone() / g;
                    let nq = -q;
                    a.row_combine(t, i, &x, &y, &nq, &p);
                    left.row_combine(t, i, &x, &y, &nq, &p);
                }
                for j in t + 1..n {
                    if a[(t, j)].is_zero() {
                        continue;
                    }
                    if a[(t, j)].is_multiple_of(&a[(t, t)]) {
                        let q = a[(t, j)].clone() / a[(t, t)].clone();
                        a.col_axpy(j, &q, t);
                        right.col_axpy(j, &q, t);
                        continue;
                    }
                    let (g, x, y) = ext_gcd(&a[(t, t)], &a[(t, j)]);
                    let p = a[(t, t)].clone() / g.clone();
                    let q = a[(t, j)].clone() / g;
                    let nq = -q;
                    a.col_combine(t, j, &x, &y, &nq, &p);
                    right.col_combine(t, j, &x, &y, &nq, &p);
                    dirty = true;
                }
                if dirty && (t + 1..m).any(|i| !a[(i, t)].is_zero()) {
                    continue;
                }
                // divisibility of the remaining block
                let piv = a[(t, t)].clone();
                let bad = (t + 1..m)
                    .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !a[(i, j)].is_multiple_of(&piv));
                match bad {
                    Some((i, _)) => {
                        let one = T::one();
                        a.row_axpy(t, &-one.clone(), i);
                        left.row_axpy(t, &-one, i);
                    }
                    None => break,
                }
            }
            if a[(t, t)].is_negative() {
                a.negate_row(t);
                left.negate_row(t);
            }
        }
        let diag = (0..r).map(|i| a[(i, i)].clone()).collect();
        Smith { diag, left, right }
    }

    /// Smith invariants `d1 | d2 | ...`, `min(rows, cols)` of them.
    pub fn smith_diagonal(&self) -> Vec<T> {
        self.smith().diag
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::Signed;

    fn im(rows: Vec<Vec<i64>>) -> Matrix<BigInt> {
        Matrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(BigInt::from).collect())
                .collect(),
        )
    }

    #[test]
    fn hnf_examples() {
        assert_eq!(im(vec![vec![2, 0], vec![0, 3]]).hnf(), im(vec![vec![2, 0], vec![0, 3]]));
        assert_eq!(im(vec![vec![2, 4], vec![0, 6]]).hnf(), im(vec![vec![2, 0], vec![0, 6]]));
    }

    #[test]
    fn hnf_transform_and_modular_agree() {
        let a = im(vec![vec![3, 1, 4, 1], vec![5, 9, 2, 6], vec![5, 3, 5, 8]]);
        let (h, u) = a.hnf_with_transform();
        assert_eq!(&a * &u, h);
        assert_eq!(u.det().abs(), BigInt::from(1));
        let sq = h.select_cols(&[1, 2, 3]);
        let d = sq.det().abs();
        assert_eq!(a.hnf_modular(&d), sq);
        assert_eq!(a.hnf_modular(&(d.clone() * 7)), sq);
    }

    #[test]
    fn smith_examples() {
        let d = im(vec![vec![4, 0], vec![0, 6]]).smith_diagonal();
        assert_eq!(d, vec![BigInt::from(2), BigInt::from(12)]);
        let z = im(vec![vec![0, 0], vec![0, 0]]).smith_diagonal();
        assert_eq!(z, vec![BigInt::from(0), BigInt::from(0)]);
        let a = im(vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = a.smith();
        assert_eq!(s.diag, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        assert_eq!(&(&s.left * &a) * &s.right, Matrix::diagonal(&s.diag));
    }

    #[test]
    fn det_small() {
        assert_eq!(im(vec![vec![0, 1], vec![1, 0]]).det(), BigInt::from(-1));
        assert_eq!(
            im(vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]).det(),
            BigInt::from(4)
        );
        let a: Matrix<i64> = Matrix::from_rows(vec![vec![1, 2], vec![3, 4]]);
        assert_eq!(a.det(), -2);
    }
}
