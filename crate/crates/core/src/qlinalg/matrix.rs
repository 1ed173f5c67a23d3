use super::Rational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{}[", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(r).iter().map(super::format_rational).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    /// Builds from rows; `cols` is needed only when there are no rows.
    pub fn from_rows_with_cols(rows: Vec<Vec<Rational>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix rows");
            data.extend(row);
        }
        Matrix { rows: r, cols, data }
    }

    /// Builds from non-empty rows. Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows_with_cols(rows, cols)
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| super::q(x)).collect()).collect())
    }

    /// Column vector.
    pub fn column(v: Vec<Rational>) -> Self {
        let n = v.len();
        Matrix { rows: n, cols: 1, data: v }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.rows)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c).clone();
            }
        }
        t
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    /// Multiplies by a sign in {-1, 0, 1}.
    pub fn signed(&self, s: i8) -> Self {
        match s {
            1 => self.clone(),
            -1 => -self,
            _ => Self::zeros(self.rows, self.cols),
        }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|r| super::dot(self.row(r), v)).collect()
    }

    /// Writes `block` into `self` with its top-left corner at (r0, c0).
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.get(r, c).clone());
            }
        }
    }

    /// Adds `block` into `self` at (r0, c0).
    pub fn add_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                let v = self.get(r0 + r, c0 + c) + block.get(r, c);
                self.set(r0 + r, c0 + c, v);
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        let mut m = Matrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, self.get(r0 + r, c0 + c).clone());
            }
        }
        m
    }

    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                m.set(r, j, self.get(r, c).clone());
            }
        }
        m
    }

    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let mut m = Matrix::zeros(self.rows, self.cols + other.cols);
        m.set_block(0, 0, self);
        m.set_block(0, self.cols, other);
        m
    }

    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let mut m = Matrix::zeros(self.rows + other.rows, self.cols + other.cols);
        m.set_block(0, 0, self);
        m.set_block(self.rows, self.cols, other);
        m
    }

    /// Kronecker product.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let mut m = Matrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let a = self.get(r, c);
                if a.is_zero() {
                    continue;
                }
                m.set_block(r * other.rows, c * other.cols, &other.scale(a));
            }
        }
        m
    }

    /// Determinant of a square matrix.
    pub fn det(&self) -> Rational {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a.get(r, c).is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                a.swap_rows(p, c);
                det = -det;
            }
            let piv = a.get(c, c).clone();
            det *= &piv;
            for r in c + 1..n {
                let f = a.get(r, c) / &piv;
                if f.is_zero() {
                    continue;
                }
                for k in c..n {
                    let v = a.get(r, k) - &f * a.get(c, k);
                    a.set(r, k, v);
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch {:?} * {:?}", self.shape(), rhs.shape());
        let mut m = Matrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.get(k, c);
                    if !b.is_zero() {
                        let idx = r * rhs.cols + c;
                        m.data[idx] += a * b;
                    }
                }
            }
        }
        m
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape());
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape());
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }
}

/// Rank over Q by fraction-free (Bareiss) elimination on an integer copy.
pub fn rank(m: &Matrix) -> usize {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return 0;
    }
    // Clear denominators row by row; this does not change the rank.
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|r| {
            let row = m.row(r);
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect();
    let mut prev = BigInt::one();
    let mut rk = 0;
    for c in 0..cols {
        if rk == rows {
            break;
        }
        let Some(p) = (rk..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rk, p);
        for r in rk + 1..rows {
            for k in c + 1..cols {
                let v = (&a[rk][c] * &a[r][k] - &a[r][c] * &a[rk][k]) / &prev;
                a[r][k] = v;
            }
            a[r][c] = BigInt::zero();
        }
        prev = a[rk][c].clone();
        rk += 1;
    }
    rk
}

/// Reduced row echelon form and the pivot columns.
pub fn rref(m: &Matrix) -> (Matrix, Vec<usize>) {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        a.swap_rows(p, r);
        let inv = a.get(r, c).recip();
        for k in c..cols {
            let v = a.get(r, k) * &inv;
            a.set(r, k, v);
        }
        for i in 0..rows {
            if i == r || a.get(i, c).is_zero() {
                continue;
            }
            let f = a.get(i, c).clone();
            for k in c..cols {
                let v = a.get(i, k) - &f * a.get(r, k);
                a.set(i, k, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Columns form a basis of the null space, one per free column, with an
/// identity pattern on the free coordinates.
pub fn kernel_basis(m: &Matrix) -> Matrix {
    let cols = m.cols();
    let (r, pivots) = rref(m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut k = Matrix::zeros(cols, free.len());
    for (j, &fc) in free.iter().enumerate() {
        k.set(fc, j, Rational::one());
        for (i, &pc) in pivots.iter().enumerate() {
            k.set(pc, j, -r.get(i, fc));
        }
    }
    k
}

/// A full-row-rank `P` in reduced row echelon form with `P * m = 0`.
pub fn cokernel_projection(m: &Matrix) -> Matrix {
    let left = kernel_basis(&m.transpose()).transpose();
    if left.rows() == 0 {
        return left;
    }
    rref(&left).0
}

/// Solves `a * x = b` exactly; `None` when inconsistent. Free variables are set to zero.
pub fn solve(a: &Matrix, b: &Matrix) -> Option<Matrix> {
    assert_eq!(a.rows(), b.rows(), "solve: row mismatch");
    let n = a.cols();
    let (r, pivots) = rref(&a.hstack(b));
    if pivots.iter().any(|&p| p >= n) {
        return None;
    }
    let mut x = Matrix::zeros(n, b.cols());
    for (i, &pc) in pivots.iter().enumerate() {
        for j in 0..b.cols() {
            x.set(pc, j, r.get(i, n + j).clone());
        }
    }
    Some(x)
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse(a: &Matrix) -> Option<Matrix> {
    if a.rows() != a.cols() {
        return None;
    }
    if rank(a) != a.rows() {
        return None;
    }
    solve(a, &Matrix::identity(a.rows()))
}
