//! Matrices of polynomials truncated modulo `x^(cap+1)`.
//!
//! Storage is coefficient-major: a [`PolyMatrix`] is the list of scalar
//! matrices `M_0, M_1, ...` with `P(x) = sum_k M_k x^k`. Products run
//! Karatsuba over that list (the ring of matrices is non-commutative, which
//! Karatsuba tolerates as long as operand order is kept), or fall back to one
//! scalar polynomial product per entry when the matrices are tiny compared to
//! the polynomial length.

use crate::error::{dim_err, Result};
use crate::field::{PrimeField, Scalar};
use crate::matrix::{Matrix, WideAcc};
use crate::poly::{self, Poly};

/// Length below which matrix-sequence convolutions use the schoolbook method.
/// Leaves are whole matrix products, so deep recursion pays off once the inner
/// dimension makes a product much dearer than the extra additions.
fn conv_base(inner: usize) -> usize {
    match inner {
        0..=3 => 8,
        4..=15 => 4,
        _ => 2,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    cap: usize,
    coeffs: Vec<Matrix>,
}

impl PolyMatrix {
    pub fn zero(rows: usize, cols: usize, cap: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            cap,
            coeffs: Vec::new(),
        }
    }

    /// The constant identity.
    pub fn identity(n: usize, cap: usize) -> Self {
        PolyMatrix {
            rows: n,
            cols: n,
            cap,
            coeffs: vec![Matrix::identity(n)],
        }
    }

    /// Builds `sum_k coeffs[k] x^k`, dropping terms above the cap.
    pub fn from_coeffs(rows: usize, cols: usize, cap: usize, coeffs: Vec<Matrix>) -> Result<Self> {
        if coeffs.iter().any(|m| m.rows() != rows || m.cols() != cols) {
            return Err(dim_err("coefficient matrix shape"));
        }
        let mut p = PolyMatrix {
            rows,
            cols,
            cap,
            coeffs,
        };
        p.trim();
        Ok(p)
    }

    /// Builds from per-entry polynomials (row-major, `rows * cols` entries).
    pub fn from_entries(rows: usize, cols: usize, cap: usize, entries: &[Poly]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(dim_err("entry count"));
        }
        let len = entries.iter().map(|p| p.coeffs().len()).max().unwrap_or(0).min(cap + 1);
        let mut coeffs = vec![Matrix::zeros(rows, cols); len];
        for (idx, p) in entries.iter().enumerate() {
            for (k, &c) in p.coeffs().iter().take(len).enumerate() {
                coeffs[k].set(idx / cols, idx % cols, c);
            }
        }
        PolyMatrix::from_coeffs(rows, cols, cap, coeffs)
    }

    fn trim(&mut self) {
        self.coeffs.truncate(self.cap + 1);
        while self.coeffs.last().is_some_and(Matrix::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Stored coefficient matrices (trailing zero terms are not stored).
    pub fn coeffs(&self) -> &[Matrix] {
        &self.coeffs
    }

    /// Coefficient matrix of `x^k`.
    pub fn coeff(&self, k: usize) -> Matrix {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.rows, self.cols))
    }

    pub fn entry(&self, i: usize, j: usize) -> Poly {
        Poly::with_cap(self.coeffs.iter().map(|m| m.get(i, j)).collect(), self.cap)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &PolyMatrix, fp: &PrimeField) -> Result<PolyMatrix> {
        self.check_shape(other)?;
        let mut coeffs = self.coeffs.clone();
        add_seq(fp, &mut coeffs, &other.coeffs);
        PolyMatrix::from_coeffs(self.rows, self.cols, self.cap.min(other.cap), coeffs)
    }

    pub fn sub(&self, other: &PolyMatrix, fp: &PrimeField) -> Result<PolyMatrix> {
        self.check_shape(other)?;
        let mut coeffs = self.coeffs.clone();
        if coeffs.len() < other.coeffs.len() {
            coeffs.resize(other.coeffs.len(), Matrix::zeros(self.rows, self.cols));
        }
        for (a, b) in coeffs.iter_mut().zip(&other.coeffs) {
            a.sub_assign(b, fp);
        }
        PolyMatrix::from_coeffs(self.rows, self.cols, self.cap.min(other.cap), coeffs)
    }

    /// Multiplies by `x^s`.
    pub fn shift(&self, s: usize) -> PolyMatrix {
        let mut coeffs = vec![Matrix::zeros(self.rows, self.cols); s];
        coeffs.extend(self.coeffs.iter().cloned());
        let mut p = PolyMatrix { coeffs, ..*self };
        p.coeffs.truncate(self.cap + 1);
        p.trim();
        p
    }

    /// Left-multiplies by `diag(d)`.
    pub fn scale_rows(&self, d: &[Scalar], fp: &PrimeField) -> Result<PolyMatrix> {
        if d.len() != self.rows {
            return Err(dim_err("row scaling length"));
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|m| {
                let mut m = m.clone();
                for (i, &s) in d.iter().enumerate() {
                    for v in m.row_mut(i) {
                        *v = fp.mul(*v, s);
                    }
                }
                m
            })
            .collect();
        PolyMatrix::from_coeffs(self.rows, self.cols, self.cap, coeffs)
    }

    pub fn with_cap(mut self, cap: usize) -> PolyMatrix {
        self.cap = cap;
        self.trim();
        self
    }

    fn check_shape(&self, other: &PolyMatrix) -> Result<()> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(dim_err("poly matrix shapes differ"));
        }
        Ok(())
    }
}

/// Product `P Q` truncated modulo `x^(cap+1)`.
pub fn polymat_mul(fp: &PrimeField, p: &PolyMatrix, q: &PolyMatrix, cap: usize) -> Result<PolyMatrix> {
    if p.cols != q.rows {
        return Err(dim_err(format!("{}x{} times {}x{}", p.rows, p.cols, q.rows, q.cols)));
    }
    let (rows, inner, cols) = (p.rows, p.cols, q.cols);
    if p.is_zero() || q.is_zero() || rows == 0 || cols == 0 {
        return Ok(PolyMatrix::zero(rows, cols, cap));
    }
    let a = &p.coeffs[..p.coeffs.len().min(cap + 1)];
    let b = &q.coeffs[..q.coeffs.len().min(cap + 1)];
    let longest = a.len().max(b.len());
    let coeffs = if rows * inner * cols <= longest {
        entrywise(fp, a, b, rows, inner, cols, cap)
    } else {
        let mut out = conv(fp, a, b, conv_base(inner));
        out.truncate(cap + 1);
        out
    };
    PolyMatrix::from_coeffs(rows, cols, cap, coeffs)
}

/// Coefficients `m, ..., 2m-1` of `P Q`, where `Q` has degree below `m`.
///
/// Only coefficients `1..2m` of `P` contribute. The window is a Hankel
/// product of those coefficients with the reversed coefficients of `Q`,
/// evaluated by transposed Karatsuba with three half-size products per level.
pub fn polymat_middle_product(fp: &PrimeField, p: &PolyMatrix, q: &PolyMatrix, m: usize) -> Result<Vec<Matrix>> {
    if p.cols != q.rows {
        return Err(dim_err(format!("{}x{} times {}x{}", p.rows, p.cols, q.rows, q.cols)));
    }
    if q.coeffs.len() > m {
        return Err(dim_err(format!(
            "second factor has degree {} >= {m}",
            q.coeffs.len() - 1
        )));
    }
    let mut out = vec![Matrix::zeros(p.rows, q.cols); m];
    if m == 0 || p.rows == 0 || q.cols == 0 || p.is_zero() || q.is_zero() {
        return Ok(out);
    }
    let h: Vec<Matrix> = (1..2 * m).map(|i| p.coeff(i)).collect();
    let w: Vec<Matrix> = (0..m).map(|s| q.coeff(m - 1 - s)).collect();
    let base = conv_base(p.cols).clamp(1, 2);
    middle_into(fp, &h, &w, &mut out, base);
    Ok(out)
}

/// `out_t += sum_s h_{t+s} w_s` for `t, s < w.len()`.
fn middle_into(fp: &PrimeField, h: &[Matrix], w: &[Matrix], out: &mut [Matrix], base: usize) {
    let size = w.len();
    if size <= base {
        let cols = w[0].cols();
        for (t, o) in out.iter_mut().enumerate() {
            for r in 0..o.rows() {
                let mut acc = WideAcc::new(fp, cols);
                for (s, ws) in w.iter().enumerate() {
                    for (k, &x) in h[t + s].row(r).iter().enumerate() {
                        acc.axpy(x, ws.row(k));
                    }
                }
                for (v, a) in o.row_mut(r).iter_mut().zip(acc.finish()) {
                    *v = fp.add(*v, a);
                }
            }
        }
        return;
    }
    if size % 2 == 1 {
        // peel the last row and column
        let k = size - 1;
        middle_into(fp, &h[..2 * k - 1], &w[..k], &mut out[..k], base);
        for t in 0..k {
            let extra = h[t + k].mul(&w[k], fp).expect("shapes checked");
            out[t].add_assign(&extra, fp);
        }
        middle_into(fp, &h[k..], w, &mut out[k..], size);
        return;
    }
    let k = size / 2;
    let (w0, w1) = w.split_at(k);
    let (out0, out1) = out.split_at_mut(k);
    // blocks H00 = h[0..], H01 = H10 = h[k..], H11 = h[2k..], each 2k-1 long
    let h01 = &h[k..3 * k - 1];
    let ws: Vec<Matrix> = w0
        .iter()
        .zip(w1)
        .map(|(a, b)| {
            let mut m = a.clone();
            m.add_assign(b, fp);
            m
        })
        .collect();
    let mut beta = vec![Matrix::zeros(out0[0].rows(), out0[0].cols()); k];
    middle_into(fp, h01, &ws, &mut beta, base);
    // out0 += beta + (H00 - H01) w0, out1 += beta + (H11 - H01) w1
    for (o, b) in out0.iter_mut().zip(&beta).chain(out1.iter_mut().zip(&beta)) {
        o.add_assign(b, fp);
    }
    let diff = |lo: usize| -> Vec<Matrix> {
        (0..2 * k - 1)
            .map(|i| {
                let mut m = h[lo + i].clone();
                m.sub_assign(&h01[i], fp);
                m
            })
            .collect()
    };
    middle_into(fp, &diff(0), w0, out0, base);
    middle_into(fp, &diff(2 * k), w1, out1, base);
}

fn entrywise(
    fp: &PrimeField,
    a: &[Matrix],
    b: &[Matrix],
    rows: usize,
    inner: usize,
    cols: usize,
    cap: usize,
) -> Vec<Matrix> {
    let len = (a.len() + b.len() - 1).min(cap + 1);
    let mut out = vec![Matrix::zeros(rows, cols); len];
    let entry = |seq: &[Matrix], i: usize, j: usize| -> Vec<Scalar> { seq.iter().map(|m| m.get(i, j)).collect() };
    for i in 0..rows {
        for j in 0..cols {
            let mut acc: Vec<Scalar> = Vec::new();
            for t in 0..inner {
                let prod = poly::mul(fp, &entry(a, i, t), &entry(b, t, j));
                poly::add_assign(fp, &mut acc, &prod);
            }
            for (k, &c) in acc.iter().take(len).enumerate() {
                out[k].set(i, j, c);
            }
        }
    }
    out
}

fn add_seq(fp: &PrimeField, acc: &mut Vec<Matrix>, b: &[Matrix]) {
    if let Some(m) = b.first() {
        if acc.len() < b.len() {
            acc.resize(b.len(), Matrix::zeros(m.rows(), m.cols()));
        }
    }
    for (x, y) in acc.iter_mut().zip(b) {
        x.add_assign(y, fp);
    }
}

/// Full convolution of two matrix sequences.
fn conv(fp: &PrimeField, a: &[Matrix], b: &[Matrix], base: usize) -> Vec<Matrix> {
    let (rows, cols) = (a[0].rows(), b[0].cols());
    let mut out = vec![Matrix::zeros(rows, cols); a.len() + b.len() - 1];
    conv_into(fp, a, b, &mut out, base);
    out
}

fn conv_into(fp: &PrimeField, a: &[Matrix], b: &[Matrix], out: &mut [Matrix], base: usize) {
    let short = a.len().min(b.len());
    if short <= base {
        schoolbook_into(fp, a, b, out);
    } else if a.len() == b.len() {
        let prod = karatsuba(fp, a, b, base);
        for (o, p) in out.iter_mut().zip(&prod) {
            o.add_assign(p, fp);
        }
    } else if a.len() < b.len() {
        let s = a.len();
        for (i, block) in b.chunks(s).enumerate() {
            conv_into(fp, a, block, &mut out[i * s..], base);
        }
    } else {
        let s = b.len();
        for (i, block) in a.chunks(s).enumerate() {
            conv_into(fp, block, b, &mut out[i * s..], base);
        }
    }
}

fn schoolbook_into(fp: &PrimeField, a: &[Matrix], b: &[Matrix], out: &mut [Matrix]) {
    let rows = a[0].rows();
    let cols = b[0].cols();
    for k in 0..a.len() + b.len() - 1 {
        let lo = k.saturating_sub(b.len() - 1);
        let hi = k.min(a.len() - 1);
        for r in 0..rows {
            let mut acc = WideAcc::new(fp, cols);
            for i in lo..=hi {
                let (ai, bj) = (&a[i], &b[k - i]);
                for (t, &x) in ai.row(r).iter().enumerate() {
                    acc.axpy(x, bj.row(t));
                }
            }
            let row = acc.finish();
            for (o, v) in out[k].row_mut(r).iter_mut().zip(row) {
                *o = fp.add(*o, v);
            }
        }
    }
}

fn karatsuba(fp: &PrimeField, a: &[Matrix], b: &[Matrix], base: usize) -> Vec<Matrix> {
    let n = a.len();
    if n <= base {
        let mut out = vec![Matrix::zeros(a[0].rows(), b[0].cols()); 2 * n - 1];
        schoolbook_into(fp, a, b, &mut out);
        return out;
    }
    let h = n / 2;
    let (a0, a1) = a.split_at(h);
    let (b0, b1) = b.split_at(h);
    let z0 = karatsuba(fp, a0, b0, base);
    let z2 = karatsuba(fp, a1, b1, base);
    let mut sa = a1.to_vec();
    let mut sb = b1.to_vec();
    for i in 0..h {
        sa[i].add_assign(&a0[i], fp);
        sb[i].add_assign(&b0[i], fp);
    }
    let mut z1 = karatsuba(fp, &sa, &sb, base);
    for (i, m) in z0.iter().enumerate() {
        z1[i].sub_assign(m, fp);
    }
    for (i, m) in z2.iter().enumerate() {
        z1[i].sub_assign(m, fp);
    }
    let mut out = z0;
    out.resize(2 * n - 1, Matrix::zeros(a[0].rows(), b[0].cols()));
    for (i, m) in z2.into_iter().enumerate() {
        out[2 * h + i] = m;
    }
    for (i, m) in z1.iter().enumerate() {
        out[h + i].add_assign(m, fp);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_neutral_and_scalar_case_matches_poly_mul() {
        let fp = PrimeField::new(101).unwrap();
        let q = PolyMatrix::from_entries(
            2,
            2,
            5,
            &[
                Poly::from_u64(&fp, &[1, 2]),
                Poly::from_u64(&fp, &[0, 0, 3]),
                Poly::zero(),
                Poly::from_u64(&fp, &[7]),
            ],
        )
        .unwrap();
        assert_eq!(polymat_mul(&fp, &PolyMatrix::identity(2, 5), &q, 5).unwrap(), q);

        let f = Poly::from_u64(&fp, &[1, 1]);
        let pf = PolyMatrix::from_entries(1, 1, 4, std::slice::from_ref(&f)).unwrap();
        let sq = polymat_mul(&fp, &pf, &pf, 4).unwrap();
        assert_eq!(sq.entry(0, 0).coeffs(), f.mul(&f, &fp).coeffs());
    }

    #[test]
    fn shape_mismatch() {
        let fp = PrimeField::new(101).unwrap();
        let a = PolyMatrix::identity(2, 3);
        let b = PolyMatrix::identity(3, 3);
        assert!(polymat_mul(&fp, &a, &b, 3).is_err());
    }
}
