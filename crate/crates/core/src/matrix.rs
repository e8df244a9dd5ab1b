//! Dense matrices over a prime field.

use crate::error::{dim_err, Result};
use crate::field::{PrimeField, Scalar};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::ONE);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(dim_err(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from rows of integers, reducing each into the field.
    pub fn from_rows_u64(fp: &PrimeField, rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(dim_err("ragged rows"));
        }
        let data = rows.iter().flatten().map(|&x| fp.elem(x)).collect();
        Matrix::from_vec(rows.len(), cols, data)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(n_rows: usize, cols: &[Vec<Scalar>]) -> Result<Self> {
        let mut m = Matrix::zeros(n_rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.len() != n_rows {
                return Err(dim_err("column length"));
            }
            for (i, &v) in c.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn random<R: rand::Rng + ?Sized>(fp: &PrimeField, rows: usize, cols: usize, rng: &mut R) -> Self {
        Matrix {
            rows,
            cols,
            data: fp.random_vec(rng, rows * cols),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [Scalar] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn data(&self) -> &[Scalar] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// The submatrix with the given rows and columns, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, self.get(i, j));
            }
        }
        m
    }

    pub fn add(&self, other: &Matrix, fp: &PrimeField) -> Result<Matrix> {
        self.same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| fp.add(a, b)).collect();
        Ok(Matrix { data, ..*self })
    }

    pub fn sub(&self, other: &Matrix, fp: &PrimeField) -> Result<Matrix> {
        self.same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| fp.sub(a, b)).collect();
        Ok(Matrix { data, ..*self })
    }

    pub(crate) fn add_assign(&mut self, other: &Matrix, fp: &PrimeField) {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = fp.add(*a, b);
        }
    }

    pub(crate) fn sub_assign(&mut self, other: &Matrix, fp: &PrimeField) {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = fp.sub(*a, b);
        }
    }

    pub fn scale(&self, s: Scalar, fp: &PrimeField) -> Matrix {
        let data = self.data.iter().map(|&a| fp.mul(a, s)).collect();
        Matrix { data, ..*self }
    }

    fn same_shape(&self, other: &Matrix) -> Result<()> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(dim_err(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Matrix, fp: &PrimeField) -> Result<Matrix> {
        mat_mul(fp, self, other)
    }

    pub fn mul_vec(&self, v: &[Scalar], fp: &PrimeField) -> Result<Vec<Scalar>> {
        if v.len() != self.cols {
            return Err(dim_err(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows).map(|i| fp.dot(self.row(i), v)).collect())
    }

    /// Row vector times matrix: `v^T M`.
    pub fn vec_mul(&self, v: &[Scalar], fp: &PrimeField) -> Result<Vec<Scalar>> {
        if v.len() != self.rows {
            return Err(dim_err("row vector length"));
        }
        let mut acc = WideAcc::new(fp, self.cols);
        for (i, &x) in v.iter().enumerate() {
            acc.axpy(x, self.row(i));
        }
        Ok(acc.finish())
    }

    /// Inverse, or `None` when singular.
    pub fn inverse(&self, fp: &PrimeField) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        LuFactor::new(self, fp).map(|lu| lu.inverse(fp))
    }
}

/// Accumulates rows `sum x_i * row_i` with lazy reduction.
pub(crate) struct WideAcc {
    fp: PrimeField,
    acc: Vec<u128>,
    pending: usize,
}

impl WideAcc {
    pub(crate) fn new(fp: &PrimeField, len: usize) -> Self {
        WideAcc {
            fp: *fp,
            acc: vec![0; len],
            pending: 0,
        }
    }

    #[inline]
    pub(crate) fn axpy(&mut self, x: Scalar, row: &[Scalar]) {
        if x.is_zero() {
            return;
        }
        if self.pending == self.fp.lazy_terms() {
            self.flush();
        }
        let x = x.0 as u128;
        for (a, y) in self.acc.iter_mut().zip(row) {
            *a += x * y.0 as u128;
        }
        self.pending += 1;
    }

    fn flush(&mut self) {
        let fp = self.fp;
        for a in self.acc.iter_mut() {
            *a = fp.reduce_wide(*a).0 as u128;
        }
        self.pending = 0;
    }

    pub(crate) fn finish(self) -> Vec<Scalar> {
        let fp = self.fp;
        self.acc.into_iter().map(|a| fp.reduce_wide(a)).collect()
    }
}

/// A matrix multiplication kernel.
pub trait MatMulKernel {
    fn multiply(&self, fp: &PrimeField, a: &Matrix, b: &Matrix) -> Matrix;
}

/// Row-oriented cubic multiplication with lazy `u128` accumulation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CubicKernel;

impl MatMulKernel for CubicKernel {
    fn multiply(&self, fp: &PrimeField, a: &Matrix, b: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(a.rows, b.cols);
        for i in 0..a.rows {
            let mut acc = WideAcc::new(fp, b.cols);
            for (k, &x) in a.row(i).iter().enumerate() {
                acc.axpy(x, b.row(k));
            }
            out.row_mut(i).copy_from_slice(&acc.finish());
        }
        out
    }
}

/// Product with the default kernel.
pub fn mat_mul(fp: &PrimeField, a: &Matrix, b: &Matrix) -> Result<Matrix> {
    mat_mul_with(&CubicKernel, fp, a, b)
}

pub fn mat_mul_with<K: MatMulKernel + ?Sized>(kernel: &K, fp: &PrimeField, a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols != b.rows {
        return Err(dim_err(format!("{}x{} times {}x{}", a.rows, a.cols, b.rows, b.cols)));
    }
    Ok(kernel.multiply(fp, a, b))
}

/// `A^-1`, or `None` when `A` is singular (or not square).
pub fn mat_inv(fp: &PrimeField, a: &Matrix) -> Option<Matrix> {
    a.inverse(fp)
}

/// PLU factorization of a nonsingular square matrix.
#[derive(Clone, Debug)]
pub struct LuFactor {
    lu: Matrix,
    perm: Vec<usize>,
}

impl LuFactor {
    /// Gaussian elimination with row pivoting; `None` when singular.
    pub fn new(a: &Matrix, fp: &PrimeField) -> Option<LuFactor> {
        let n = a.rows;
        debug_assert!(a.is_square());
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let piv = (col..n).find(|&r| !lu.get(r, col).is_zero())?;
            if piv != col {
                for j in 0..n {
                    let t = lu.get(col, j);
                    lu.set(col, j, lu.get(piv, j));
                    lu.set(piv, j, t);
                }
                perm.swap(col, piv);
            }
            let inv = fp.inv(lu.get(col, col)).ok()?;
            for r in col + 1..n {
                let f = fp.mul(lu.get(r, col), inv);
                if f.is_zero() {
                    continue;
                }
                lu.set(r, col, f);
                for j in col + 1..n {
                    let v = fp.sub(lu.get(r, j), fp.mul(f, lu.get(col, j)));
                    lu.set(r, j, v);
                }
            }
        }
        Some(LuFactor { lu, perm })
    }

    pub fn solve(&self, b: &[Scalar], fp: &PrimeField) -> Vec<Scalar> {
        let n = self.perm.len();
        let mut y: Vec<Scalar> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s = fp.dot(&self.lu.row(i)[..i], &y[..i]);
            y[i] = fp.sub(y[i], s);
        }
        for i in (0..n).rev() {
            let s = fp.dot(&self.lu.row(i)[i + 1..], &y[i + 1..]);
            let inv = fp.inv(self.lu.get(i, i)).expect("nonzero pivot");
            y[i] = fp.mul(fp.sub(y[i], s), inv);
        }
        y
    }

    pub fn inverse(&self, fp: &PrimeField) -> Matrix {
        let n = self.perm.len();
        let mut cols = Vec::with_capacity(n);
        let mut e = vec![Scalar::ZERO; n];
        for j in 0..n {
            e[j] = Scalar::ONE;
            cols.push(self.solve(&e, fp));
            e[j] = Scalar::ZERO;
        }
        Matrix::from_columns(n, &cols).expect("square")
    }
}

/// An `m x m` Hankel matrix given by its `2m - 1` skew-diagonal values; entry
/// `(i, j)` is `diag[i + j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HankelWindow {
    m: usize,
    diag: Vec<Scalar>,
}

impl HankelWindow {
    pub fn new(diag: Vec<Scalar>) -> Result<Self> {
        if diag.len().is_multiple_of(2) {
            return Err(dim_err(format!(
                "Hankel window needs an odd number of values, got {}",
                diag.len()
            )));
        }
        Ok(HankelWindow {
            m: diag.len().div_ceil(2),
            diag,
        })
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn diag(&self) -> &[Scalar] {
        &self.diag
    }

    pub fn to_dense(&self) -> Matrix {
        let mut h = Matrix::zeros(self.m, self.m);
        for i in 0..self.m {
            h.row_mut(i).copy_from_slice(&self.diag[i..i + self.m]);
        }
        h
    }

    /// `H v` through one polynomial product.
    pub fn mul_vec(&self, v: &[Scalar], fp: &PrimeField) -> Result<Vec<Scalar>> {
        if v.len() != self.m {
            return Err(dim_err("Hankel operand length"));
        }
        Ok(hankel_apply(fp, &self.diag, v, self.m))
    }

    /// Factors the densified matrix; `None` when singular.
    pub fn factor(&self, fp: &PrimeField) -> Option<LuFactor> {
        LuFactor::new(&self.to_dense(), fp)
    }

    /// Solves `H x = b`; `None` when `H` is singular.
    pub fn solve(&self, b: &[Scalar], fp: &PrimeField) -> Result<Option<Vec<Scalar>>> {
        if b.len() != self.m {
            return Err(dim_err("Hankel right-hand side length"));
        }
        Ok(self.factor(fp).map(|lu| lu.solve(b, fp)))
    }
}

/// First `rows` entries of `H w` where `H_{k,z} = diag[k + z]`, via the
/// correlation `sum_z diag[k + z] w[z]`, read off one convolution with the
/// reversed operand.
pub(crate) fn hankel_apply(fp: &PrimeField, diag: &[Scalar], w: &[Scalar], rows: usize) -> Vec<Scalar> {
    let m = w.len();
    if m == 0 {
        return vec![Scalar::ZERO; rows];
    }
    let used = (rows + m - 1).min(diag.len());
    let rev: Vec<Scalar> = w.iter().rev().copied().collect();
    let prod = crate::poly::mul(fp, &diag[..used], &rev);
    (0..rows)
        .map(|k| prod.get(k + m - 1).copied().unwrap_or(Scalar::ZERO))
        .collect()
}

pub fn hankel_vec_mul(fp: &PrimeField, h: &HankelWindow, v: &[Scalar]) -> Result<Vec<Scalar>> {
    h.mul_vec(v, fp)
}

pub fn hankel_solve(fp: &PrimeField, h: &HankelWindow, b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
    h.solve(b, fp)
}
