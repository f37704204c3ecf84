//! Small dense symmetric linear algebra: Cholesky, log-determinants, Schur complements.
//!
//! Information matrices in this crate are at most ~10x10, so everything is stored densely
//! in row-major order and factored with plain loops.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::{cst, Scalar};

/// Relative pivot threshold: a Cholesky pivot below `PIVOT_RTOL * m_jj` declares the matrix
/// not positive definite. Measured against the pivot's own diagonal entry, so the test does not
/// depend on how the parameters are scaled.
pub const PIVOT_RTOL: f64 = 1e-12;

/// Dense real matrix, row-major. Used for contrast matrices `A` in the DA criterion.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::domain("matrix rows must be non-empty and of equal length"));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// `(I_s 0)^T`: the `dim x s` selector of the leading `s` coordinates.
    pub fn leading_selector(dim: usize, s: usize) -> Self {
        let mut a = Self::zeros(dim, s);
        for i in 0..s.min(dim) {
            a[(i, i)] = T::one();
        }
        a
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Numerical rank by Gaussian elimination with partial pivoting.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let scale = m
            .data
            .iter()
            .fold(T::zero(), |acc, v| acc.max(v.abs()))
            .max(T::min_positive_value());
        let tol = cst::<T>(1e-10) * scale;
        let mut rank = 0;
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let (piv, pval) = (row..m.rows)
                .map(|r| (r, m[(r, col)].abs()))
                .fold((row, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pval <= tol {
                continue;
            }
            for j in 0..m.cols {
                m.data.swap(row * m.cols + j, piv * m.cols + j);
            }
            for r in row + 1..m.rows {
                let f = m[(r, col)] / m[(row, col)];
                for j in col..m.cols {
                    let v = m[(row, j)];
                    m[(r, j)] = m[(r, j)] - f * v;
                }
            }
            row += 1;
            rank += 1;
        }
        rank
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[T]> = self.data.chunks(self.cols.max(1)).collect();
        f.debug_struct("Matrix").field("rows", &rows).finish()
    }
}

/// Dense symmetric matrix. Writes go through [`SymMatrix::set`], which mirrors the entry,
/// so `m[(i, j)] == m[(j, i)]` holds bit for bit.
#[derive(Clone, PartialEq)]
pub struct SymMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> SymMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "SymMatrix dimension must be at least 1");
        Self {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn diag(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds from a generator evaluated on the upper triangle only.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds from full rows. The rows must be symmetric up to `1e-12` relative; the
    /// upper triangle is kept.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::domain("symmetric matrix must be square and non-empty"));
        }
        let tol = cst::<T>(1e-12);
        for i in 0..dim {
            for j in 0..i {
                let (a, b) = (rows[i][j], rows[j][i]);
                if (a - b).abs() > tol * (T::one() + a.abs().max(b.abs())) {
                    return Err(Error::domain(format!("matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self::from_fn(dim, |i, j| rows[i][j]))
    }

    /// `sum_k c_k v_k v_k^T` style accumulation: returns `scale * v v^T`.
    pub fn outer(v: &[T], scale: T) -> Self {
        Self::from_fn(v.len(), |i, j| scale * v[i] * v[j])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.dim).map(<[T]>::to_vec).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: T, other: &SymMatrix<T>) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + c * b;
        }
    }

    pub fn scaled(&self, c: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&v| v * c).collect(),
        }
    }

    pub fn trace(&self) -> T {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `tr(self * other)` for symmetric arguments, i.e. the Frobenius inner product.
    pub fn trace_product(&self, other: &SymMatrix<T>) -> T {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data.iter().zip(&other.data).map(|(&a, &b)| a * b).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &SymMatrix<T>) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }

    /// Principal submatrix on the given index set.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |i, j| self.get(idx[i], idx[j]))
    }

    /// Rectangular block `rows x cols`.
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> Matrix<T> {
        let mut b = Matrix::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                b[(i, j)] = self.get(r, c);
            }
        }
        b
    }

    /// `self * v`.
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// `v^T self v`.
    pub fn quad_form(&self, v: &[T]) -> T {
        self.mul_vec(v).iter().zip(v).map(|(&a, &b)| a * b).sum()
    }

    /// `B^T self B` for a `dim x k` matrix `B`.
    pub fn congruence(&self, b: &Matrix<T>) -> SymMatrix<T> {
        assert_eq!(b.rows(), self.dim, "dimension mismatch");
        let k = b.cols();
        // self * B, column by column
        let mut sb = Matrix::zeros(self.dim, k);
        for i in 0..self.dim {
            for j in 0..k {
                let mut acc = T::zero();
                for l in 0..self.dim {
                    acc = acc + self.get(i, l) * b[(l, j)];
                }
                sb[(i, j)] = acc;
            }
        }
        SymMatrix::from_fn(k, |i, j| {
            let mut acc = T::zero();
            for l in 0..self.dim {
                acc = acc + b[(l, i)] * sb[(l, j)];
            }
            acc
        })
    }

    /// `B self B^T` for a `k x dim` matrix `B`.
    pub fn congruence_t(&self, b: &Matrix<T>) -> SymMatrix<T> {
        self.congruence(&b.transpose())
    }

    pub fn cholesky(&self) -> Result<Cholesky<T>> {
        Cholesky::new(self)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<T> {
        self.eigen().0
    }

    /// Eigenvalues in ascending order with unit eigenvectors, by cyclic Jacobi rotations.
    pub fn eigen(&self) -> (Vec<T>, Vec<Vec<T>>) {
        let n = self.dim;
        let mut a = self.to_rows();
        let mut v: Vec<Vec<T>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
            .collect();
        let eps = T::epsilon();
        for _sweep in 0..100 {
            let off: T = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i][j] * a[i][j])
                .sum();
            let diag: T = (0..n).map(|i| a[i][i] * a[i][i]).sum();
            if off <= eps * eps * diag.max(T::min_positive_value()) {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    if a[p][q] == T::zero() {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (cst::<T>(2.0) * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let (akp, akq) = (a[k][p], a[k][q]);
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let (apk, aqk) = (a[p][k], a[q][k]);
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                    for row in v.iter_mut() {
                        let (vp, vq) = (row[p], row[q]);
                        row[p] = c * vp - s * vq;
                        row[q] = s * vp + c * vq;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| a[x][x].partial_cmp(&a[y][y]).unwrap_or(std::cmp::Ordering::Equal));
        let values = order.iter().map(|&k| a[k][k]).collect();
        let vectors = order.iter().map(|&k| (0..n).map(|i| v[i][k]).collect()).collect();
        (values, vectors)
    }
}

impl<T: Scalar> Index<(usize, usize)> for SymMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.dim + j]
    }
}

impl<T: fmt::Debug> fmt::Debug for SymMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[T]> = self.data.chunks(self.dim.max(1)).collect();
        f.debug_struct("SymMatrix").field("rows", &rows).finish()
    }
}

/// Lower-triangular Cholesky factor `L` with `M = L L^T`.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    dim: usize,
    l: Vec<T>,
}

impl<T: Scalar> Cholesky<T> {
    pub fn new(m: &SymMatrix<T>) -> Result<Self> {
        let n = m.dim();
        if !m.is_finite() {
            return Err(Error::numerical("non-finite entry in matrix to factor"));
        }
        let mut l = vec![T::zero(); n * n];
        for j in 0..n {
            let mjj = m.get(j, j);
            let mut d = mjj;
            for k in 0..j {
                d = d - l[j * n + k] * l[j * n + k];
            }
            if !(mjj > T::zero() && d > cst::<T>(PIVOT_RTOL) * mjj) {
                return Err(Error::SingularMatrix {
                    pivot: j,
                    context: String::new(),
                });
            }
            let djj = d.sqrt();
            l[j * n + j] = djj;
            for i in j + 1..n {
                let mut s = m.get(i, j);
                for k in 0..j {
                    s = s - l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / djj;
            }
        }
        Ok(Self { dim: n, l })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn logdet(&self) -> T {
        (0..self.dim)
            .map(|i| self.l[i * self.dim + i].ln())
            .sum::<T>()
            * cst(2.0)
    }

    /// Solves `M x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.dim;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s = s - self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s = s - self.l[k * n + i] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }

    pub fn inverse(&self) -> SymMatrix<T> {
        let n = self.dim;
        let mut inv = SymMatrix::zeros(n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = T::zero());
            e[j] = T::one();
            let col = self.solve(&e);
            for i in j..n {
                inv.set(i, j, col[i]);
            }
        }
        inv
    }
}

/// Log-determinant of a positive-definite matrix via Cholesky.
///
/// Fails with [`Error::SingularMatrix`] carrying the failing pivot instead of returning a
/// value for semi-definite or indefinite input.
pub fn logdet_psd<T: Scalar>(m: &SymMatrix<T>) -> Result<T> {
    Ok(m.cholesky()?.logdet())
}

/// Inverse of a positive-definite matrix.
pub fn inverse_pd<T: Scalar>(m: &SymMatrix<T>) -> Result<SymMatrix<T>> {
    Ok(m.cholesky()?.inverse())
}

/// `M11 - M12 M22^- M12^T` for the leading block of size `s`.
pub fn schur_complement<T: Scalar>(m: &SymMatrix<T>, s: usize) -> Result<SymMatrix<T>> {
    Ok(schur_parts(m, s)?.0)
}

/// Schur complement of the trailing block together with `X = M22^- M12^T`, one column per
/// leading coordinate, and the number of dropped trailing directions.
///
/// A singular `M22` is allowed: trailing directions whose Cholesky pivot vanishes are dropped,
/// i.e. `M22^-` is a generalized inverse. For positive semi-definite `M` the rows of `M12` lie in
/// the range of `M22`, so the complement does not depend on that choice.
pub fn schur_parts<T: Scalar>(m: &SymMatrix<T>, s: usize) -> Result<(SymMatrix<T>, Vec<Vec<T>>, usize)> {
    let n = m.dim();
    if s == 0 || s >= n {
        return Err(Error::domain(format!(
            "Schur complement block size must satisfy 1 <= s < {n}, got {s}"
        )));
    }
    if !m.is_finite() {
        return Err(Error::numerical("non-finite entry in matrix to factor"));
    }
    let lead: Vec<usize> = (0..s).collect();
    let trail: Vec<usize> = (s..n).collect();
    let m22 = m.submatrix(&trail);
    let m12 = m.block(&lead, &trail);
    let r = n - s;

    // semi-definite Cholesky: a vanishing pivot zeroes its column
    let mut l = vec![T::zero(); r * r];
    let mut dropped = 0;
    for j in 0..r {
        let mjj = m22.get(j, j);
        let mut d = mjj;
        for k in 0..j {
            d = d - l[j * r + k] * l[j * r + k];
        }
        if !(mjj > T::zero() && d > cst::<T>(PIVOT_RTOL) * mjj) {
            dropped += 1;
            continue;
        }
        let djj = d.sqrt();
        l[j * r + j] = djj;
        for i in j + 1..r {
            let mut acc = m22.get(i, j);
            for k in 0..j {
                acc = acc - l[i * r + k] * l[j * r + k];
            }
            l[i * r + j] = acc / djj;
        }
    }
    let solve = |b: &[T]| -> Vec<T> {
        let mut y = b.to_vec();
        for i in 0..r {
            if l[i * r + i] == T::zero() {
                y[i] = T::zero();
                continue;
            }
            let mut acc = y[i];
            for k in 0..i {
                acc = acc - l[i * r + k] * y[k];
            }
            y[i] = acc / l[i * r + i];
        }
        for i in (0..r).rev() {
            if l[i * r + i] == T::zero() {
                y[i] = T::zero();
                continue;
            }
            let mut acc = y[i];
            for k in i + 1..r {
                acc = acc - l[k * r + i] * y[k];
            }
            y[i] = acc / l[i * r + i];
        }
        y
    };
    let x: Vec<Vec<T>> = (0..s).map(|i| solve(m12.row(i))).collect();
    let c = SymMatrix::from_fn(s, |i, j| {
        let corr: T = m12.row(i).iter().zip(&x[j]).map(|(&a, &b)| a * b).sum();
        m.get(i, j) - corr
    });
    Ok((c, x, dropped))
}
