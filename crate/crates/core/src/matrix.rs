//! Dense matrices over arbitrary-precision integers and rationals.
//!
//! Smith/Hermite normal forms and exact kernels are the workhorses here;
//! intermediate entries grow quickly, so everything is `BigInt`-backed.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense integer matrix, row major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  [")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for IntMat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Convenience constructor from machine-integer rows.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| BigInt::from(rows[i][j]))
    }

    pub fn from_bigint_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(IntMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn column_vector(v: &[BigInt]) -> Self {
        Self::from_fn(v.len(), 1, |i, _| v[i].clone())
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

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].clone()).collect())
            .collect()
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| -self[(i, j)].clone())
    }

    pub fn scale(&self, t: &BigInt) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| t * &self[(i, j)])
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a * &other[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Stack blocks along the diagonal.
    pub fn block_diag(blocks: &[&IntMat]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(r0 + i, c0 + j)] = b[(i, j)].clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Horizontal concatenation.
    pub fn hstack(left: &IntMat, right: &IntMat) -> Self {
        assert_eq!(left.rows, right.rows);
        Self::from_fn(left.rows, left.cols + right.cols, |i, j| {
            if j < left.cols {
                left[(i, j)].clone()
            } else {
                right[(i, j - left.cols)].clone()
            }
        })
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = 1i8;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        for j in 0..n {
                            let t = a[(k, j)].clone();
                            a[(k, j)] = a[(i, j)].clone();
                            a[(i, j)] = t;
                        }
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = &num / &prev; // exact by Bareiss
                }
                a[(i, k)] = BigInt::zero();
            }
            prev = a[(k, k)].clone();
        }
        let d = a[(n - 1, n - 1)].clone();
        if sign < 0 {
            -d
        } else {
            d
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// row_i -= q * row_j
    fn row_sub(&mut self, i: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let t = q * &self[(j, c)];
            self[(i, c)] -= t;
        }
    }

    /// col_i -= q * col_j
    fn col_sub(&mut self, i: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let t = q * &self[(r, j)];
            self[(r, i)] -= t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let t = -self[(i, c)].clone();
            self[(i, c)] = t;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for r in 0..self.rows {
            let t = -self[(r, j)].clone();
            self[(r, j)] = t;
        }
    }

    /// Column-style Hermite normal form: returns `(h, u)` with
    /// `self * u = h`, `u` unimodular, pivots positive and entries left of
    /// each pivot reduced into `[0, pivot)`.
    pub fn hnf(&self) -> (IntMat, IntMat) {
        let mut h = self.clone();
        let mut u = IntMat::identity(self.cols);
        let mut r = 0usize;
        for i in 0..self.rows {
            if r >= self.cols {
                break;
            }
            if (r..self.cols).all(|j| h[(i, j)].is_zero()) {
                continue;
            }
            loop {
                // move the absolutely smallest nonzero entry of row i to column r
                let j_min = (r..self.cols)
                    .filter(|&j| !h[(i, j)].is_zero())
                    .min_by_key(|&j| h[(i, j)].abs())
                    .expect("nonzero entry exists");
                h.swap_cols(r, j_min);
                u.swap_cols(r, j_min);
                let mut any = false;
                for j in r + 1..self.cols {
                    if h[(i, j)].is_zero() {
                        continue;
                    }
                    let q = div_round(&h[(i, j)], &h[(i, r)]);
                    h.col_sub(j, r, &q);
                    u.col_sub(j, r, &q);
                    if !h[(i, j)].is_zero() {
                        any = true;
                    }
                }
                if !any {
                    break;
                }
            }
            if h[(i, r)].is_negative() {
                h.negate_col(r);
                u.negate_col(r);
            }
            for j in 0..r {
                let q = h[(i, j)].div_floor(&h[(i, r)]);
                h.col_sub(j, r, &q);
                u.col_sub(j, r, &q);
            }
            r += 1;
        }
        (h, u)
    }

    /// Smith normal form: returns `(d, u, v)` with `u * self * v = d`,
    /// `u`, `v` unimodular, `d` diagonal with nonnegative entries and
    /// `d[i] | d[i+1]`.
    ///
    /// The pivot is re-selected as the absolutely smallest nonzero entry of
    /// the trailing block on every reduction round, which keeps the
    /// intermediate entries from exploding.
    pub fn snf(&self) -> Snf {
        let (m, n) = (self.rows, self.cols);
        let mut d = self.clone();
        let mut u = IntMat::identity(m);
        let mut v = IntMat::identity(n);
        let mut t = 0usize;
        'position: while t < m.min(n) {
            loop {
                // absolutely smallest nonzero entry of the trailing block
                let mut pivot: Option<(usize, usize)> = None;
                for i in t..m {
                    for j in t..n {
                        if !d[(i, j)].is_zero()
                            && pivot
                                .map(|(pi, pj)| d[(i, j)].abs() < d[(pi, pj)].abs())
                                .unwrap_or(true)
                        {
                            pivot = Some((i, j));
                        }
                    }
                }
                let Some((pi, pj)) = pivot else { break 'position };
                d.swap_rows(t, pi);
                u.swap_rows(t, pi);
                d.swap_cols(t, pj);
                v.swap_cols(t, pj);
                // one reduction pass against the current pivot
                let mut clean = true;
                for i in t + 1..m {
                    if d[(i, t)].is_zero() {
                        continue;
                    }
                    let q = div_round(&d[(i, t)], &d[(t, t)]);
                    d.row_sub(i, t, &q);
                    u.row_sub(i, t, &q);
                    if !d[(i, t)].is_zero() {
                        clean = false;
                    }
                }
                for j in t + 1..n {
                    if d[(t, j)].is_zero() {
                        continue;
                    }
                    let q = div_round(&d[(t, j)], &d[(t, t)]);
                    d.col_sub(j, t, &q);
                    v.col_sub(j, t, &q);
                    if !d[(t, j)].is_zero() {
                        clean = false;
                    }
                }
                if !clean {
                    continue;
                }
                // row and column t are clear; enforce divisibility of the rest
                let mut bad = None;
                'scan: for i in t + 1..m {
                    for j in t + 1..n {
                        if !(&d[(i, j)] % &d[(t, t)]).is_zero() {
                            bad = Some(i);
                            break 'scan;
                        }
                    }
                }
                match bad {
                    Some(i) => {
                        let minus_one = -BigInt::one();
                        // fold row i into row t, then keep reducing
                        d.row_sub(t, i, &minus_one);
                        u.row_sub(t, i, &minus_one);
                    }
                    None => break,
                }
            }
            if d[(t, t)].is_negative() {
                d.negate_row(t);
                u.negate_row(t);
            }
            t += 1;
        }
        Snf { d, u, v }
    }

    /// Saturated basis of the integer kernel `{x : self * x = 0}`,
    /// returned as the columns of an `n x k` matrix.
    pub fn kernel(&self) -> IntMat {
        let snf = self.snf();
        let rank = snf.rank();
        let n = self.cols;
        IntMat::from_fn(n, n - rank, |i, j| snf.v[(i, rank + j)].clone())
    }

    /// Exact inverse for matrices with determinant +-1.
    ///
    /// Goes through rational Gauss-Jordan elimination: the entries of the
    /// inverse are cofactors, so the intermediate growth is polynomial.
    pub fn inverse_unimodular(&self) -> Result<IntMat> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of non-square".into()));
        }
        if !self.det().abs().is_one() {
            return Err(Error::NotUnimodular(self.det().to_string()));
        }
        let inv = self
            .to_rational()
            .inverse()
            .expect("unimodular matrix is invertible");
        Ok(inv
            .to_integer()
            .expect("inverse of a unimodular integer matrix is integral"))
    }

    pub fn to_rational(&self) -> RatMat {
        RatMat::from_fn(self.rows, self.cols, |i, j| {
            BigRational::from_integer(self[(i, j)].clone())
        })
    }
}

/// Result of a Smith normal form computation, `u * m * v = d`.
pub struct Snf {
    pub d: IntMat,
    pub u: IntMat,
    pub v: IntMat,
}

impl Snf {
    pub fn rank(&self) -> usize {
        (0..self.d.rows().min(self.d.cols()))
            .take_while(|&i| !self.d[(i, i)].is_zero())
            .count()
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }
}

/// Quotient minimizing the absolute remainder.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let mut q = a / b;
    let r = a - &q * b;
    if r.abs() * 2u8 > b.abs() {
        if r.is_negative() == b.is_negative() {
            q += 1;
        } else {
            q -= 1;
        }
    }
    q
}

/// Dense rational matrix, used for the few places where exact division is
/// unavoidable (restrictions, extensions, signature reduction).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl Index<(usize, usize)> for RatMat {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMat {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigRational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigRational) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
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

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = &self[(i, k)] * &other[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// `self^T * other`
    pub fn transposed_mul(&self, other: &Self) -> Self {
        self.transpose().mul(other)
    }

    /// Gauss-Jordan inverse; `None` if singular.
    pub fn inverse(&self) -> Option<RatMat> {
        assert!(self.rows == self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RatMat::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&i| !a[(i, col)].is_zero())?;
            if pivot != col {
                for j in 0..n {
                    let t = a[(col, j)].clone();
                    a[(col, j)] = a[(pivot, j)].clone();
                    a[(pivot, j)] = t;
                    let t = inv[(col, j)].clone();
                    inv[(col, j)] = inv[(pivot, j)].clone();
                    inv[(pivot, j)] = t;
                }
            }
            let p = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] /= p.clone();
                inv[(col, j)] /= p.clone();
            }
            for i in 0..n {
                if i == col || a[(i, col)].is_zero() {
                    continue;
                }
                let f = a[(i, col)].clone();
                for j in 0..n {
                    let t = &f * &a[(col, j)];
                    a[(i, j)] -= t;
                    let t = &f * &inv[(col, j)];
                    inv[(i, j)] -= t;
                }
            }
        }
        Some(inv)
    }

    /// Returns the integer matrix if every entry is integral.
    pub fn to_integer(&self) -> Option<IntMat> {
        let mut out = IntMat::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self[(i, j)].is_integer() {
                    return None;
                }
                out[(i, j)] = self[(i, j)].to_integer();
            }
        }
        Some(out)
    }
}
