//! Frobenius normal form of a generic matrix and matrix power queries.
//!
//! For a generic `A` and a generic vector `u`, the Krylov matrix
//! `U = [u, Au, ..., A^(n-1) u]` satisfies `A U = U C` where `C` is the
//! companion matrix of the characteristic polynomial
//! `t^n + c_{n-1} t^(n-1) + ... + c_0`. Because `U C^k` only shifts the
//! Krylov columns, every power `A^k = U C^k U^-1` can be read from the
//! `n x (2n-1)` matrix `R` whose row `i` holds entries `2..2n` of the linear
//! recurrent sequence started by row `i` of `U`.

use rand::Rng;

use crate::error::{check_index, dim_err, Error, Result};
use crate::field::{PrimeField, Scalar};
use crate::matrix::{hankel_apply, mat_mul, HankelWindow, Matrix};
use crate::poly::{self, Poly};
use crate::polymat::{polymat_middle_product, PolyMatrix};

/// The chosen vectors were not generic for the matrix (or the matrix is not
/// generic). Retrying with fresh random vectors is the expected response.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NotGeneric;

impl std::fmt::Display for NotGeneric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Krylov iterates are linearly dependent")
    }
}

impl std::error::Error for NotGeneric {}

/// `A = U C U^-1` with `C` the companion matrix of `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusForm {
    n: usize,
    c: Vec<Scalar>,
    u: Matrix,
    u_inv: Matrix,
}

impl FrobeniusForm {
    pub fn order(&self) -> usize {
        self.n
    }

    /// Lower coefficients `c_0 .. c_{n-1}` of the monic characteristic
    /// polynomial.
    pub fn charpoly_coeffs(&self) -> &[Scalar] {
        &self.c
    }

    /// The monic characteristic polynomial.
    pub fn charpoly(&self) -> Poly {
        let mut coeffs = self.c.clone();
        coeffs.push(Scalar::ONE);
        Poly::new(coeffs)
    }

    pub fn u(&self) -> &Matrix {
        &self.u
    }

    pub fn u_inv(&self) -> &Matrix {
        &self.u_inv
    }

    /// Checks `A U = U C` and `U U^-1 = I` exactly. Materializes `C`, so this
    /// is meant for verification only.
    pub fn is_valid_for(&self, fp: &PrimeField, a: &Matrix) -> bool {
        if a.rows() != self.n || !a.is_square() {
            return false;
        }
        let c = companion_matrix(fp, &self.c);
        let au = mat_mul(fp, a, &self.u).expect("square");
        let uc = mat_mul(fp, &self.u, &c).expect("square");
        let id = mat_mul(fp, &self.u, &self.u_inv).expect("square");
        au == uc && id == Matrix::identity(self.n)
    }
}

/// Companion matrix with ones on the subdiagonal and last column
/// `-c_0, ..., -c_{n-1}`.
pub fn companion_matrix(fp: &PrimeField, c: &[Scalar]) -> Matrix {
    let n = c.len();
    let mut m = Matrix::zeros(n, n);
    for i in 1..n {
        m.set(i, i - 1, Scalar::ONE);
    }
    for (i, &ci) in c.iter().enumerate() {
        m.set(i, n - 1, fp.neg(ci));
    }
    m
}

/// The Krylov sequence `u, Au, ..., A^(m-1) u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Iterates {
    pub vecs: Vec<Vec<Scalar>>,
}

impl Iterates {
    pub fn len(&self) -> usize {
        self.vecs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vecs.is_empty()
    }

    pub fn seed(&self) -> Option<&[Scalar]> {
        self.vecs.first().map(Vec::as_slice)
    }
}

/// Iterates by repeated matrix-vector products.
pub fn naive_iterates(fp: &PrimeField, a: &Matrix, u: &[Scalar], m: usize) -> Result<Iterates> {
    if !a.is_square() || u.len() != a.cols() {
        return Err(dim_err("iterates need a square matrix and a matching vector"));
    }
    let mut vecs = Vec::with_capacity(m);
    if m > 0 {
        vecs.push(u.to_vec());
    }
    while vecs.len() < m {
        let next = a.mul_vec(vecs.last().expect("nonempty"), fp)?;
        vecs.push(next);
    }
    Ok(Iterates { vecs })
}

/// Builds the form from `n` iterates of `u` under `A` and `n` iterates of `v`
/// under `A^T`.
///
/// The Hankel matrix `VU` with entries `v^T A^(i+j) u` is assembled from inner
/// products of the given iterates; if it is singular either family is
/// dependent and [`NotGeneric`] is returned.
pub fn fnf_from_iterates(
    fp: &PrimeField,
    a: &Matrix,
    iter_u: &Iterates,
    iter_v: &Iterates,
) -> Result<std::result::Result<FrobeniusForm, NotGeneric>> {
    let n = a.rows();
    if !a.is_square() || n == 0 {
        return Err(dim_err("Frobenius form needs a nonempty square matrix"));
    }
    if iter_u.len() != n || iter_v.len() != n {
        return Err(dim_err("need exactly n iterates of each vector"));
    }
    if iter_u.vecs.iter().chain(&iter_v.vecs).any(|x| x.len() != n) {
        return Err(dim_err("iterate length"));
    }
    let last_u = &iter_u.vecs[n - 1];
    let diag: Vec<Scalar> = (0..2 * n - 1)
        .map(|k| {
            if k < n {
                fp.dot(&iter_v.vecs[0], &iter_u.vecs[k])
            } else {
                fp.dot(&iter_v.vecs[k - n + 1], last_u)
            }
        })
        .collect();
    let hankel = HankelWindow::new(diag)?;
    let Some(lu) = hankel.factor(fp) else {
        return Ok(Err(NotGeneric));
    };
    // U^-1 = (VU)^-1 V, one column of V at a time
    let cols: Vec<Vec<Scalar>> = (0..n)
        .map(|j| {
            let vj: Vec<Scalar> = iter_v.vecs.iter().map(|row| row[j]).collect();
            lu.solve(&vj, fp)
        })
        .collect();
    let u_inv = Matrix::from_columns(n, &cols)?;
    let u = Matrix::from_columns(n, &iter_u.vecs)?;
    let a_last = a.mul_vec(last_u, fp)?;
    let c = u_inv.mul_vec(&a_last, fp)?.into_iter().map(|x| fp.neg(x)).collect();
    Ok(Ok(FrobeniusForm { n, c, u, u_inv }))
}

/// Default retry budget `ceil(64 (1 + log2 n)^2)`.
pub fn default_max_attempts(n: usize) -> usize {
    let l = 1.0 + (n.max(1) as f64).log2();
    (64.0 * l * l).ceil() as usize
}

/// Las Vegas construction from uniformly random `u`, `v`, retried up to
/// `max_attempts` times (see [`default_max_attempts`]).
pub fn compute_fnf<R: Rng + ?Sized>(
    fp: &PrimeField,
    a: &Matrix,
    rng: &mut R,
    max_attempts: Option<usize>,
) -> Result<FrobeniusForm> {
    let n = a.rows();
    if !a.is_square() || n == 0 {
        return Err(dim_err("Frobenius form needs a nonempty square matrix"));
    }
    let attempts = max_attempts.unwrap_or_else(|| default_max_attempts(n));
    let at = a.transpose();
    for _ in 0..attempts {
        let u = fp.random_vec(rng, n);
        let v = fp.random_vec(rng, n);
        let iu = naive_iterates(fp, a, &u, n)?;
        let iv = naive_iterates(fp, &at, &v, n)?;
        if let Ok(form) = fnf_from_iterates(fp, a, &iu, &iv)? {
            return Ok(form);
        }
    }
    Err(Error::GenericityFailure { attempts })
}

/// Extends order-`n` linear recurrences
/// `a_k = -sum_i c_i a_(k-n+i)` by `n` terms.
///
/// Holds the series inverse of the reversed characteristic polynomial
/// `1 + c_{n-1} x + ... + c_0 x^n`, so each extension costs two truncated
/// products.
#[derive(Clone, Debug)]
pub struct RecurrenceExtender {
    fp: PrimeField,
    rev: Vec<Scalar>,
    rev_inv: Vec<Scalar>,
}

impl RecurrenceExtender {
    pub fn new(fp: &PrimeField, c: &[Scalar]) -> Result<Self> {
        let n = c.len();
        let mut rev = Vec::with_capacity(n + 1);
        rev.push(Scalar::ONE);
        rev.extend(c.iter().rev().copied());
        let rev_inv = poly::series_inv(fp, &rev, 2 * n)?;
        Ok(RecurrenceExtender { fp: *fp, rev, rev_inv })
    }

    pub fn order(&self) -> usize {
        self.rev.len() - 1
    }

    /// Terms `n+1 .. 2n` from `a_1 .. a_n`.
    pub fn extend(&self, init: &[Scalar]) -> Result<Vec<Scalar>> {
        let n = self.order();
        if init.len() != n {
            return Err(dim_err(format!(
                "recurrence of order {n} needs {n} initial terms, got {}",
                init.len()
            )));
        }
        let num = poly::mul_truncated(&self.fp, init, &self.rev, n);
        let full = poly::mul_truncated(&self.fp, &num, &self.rev_inv, 2 * n);
        Ok(full[n..].to_vec())
    }
}

/// One-shot form of [`RecurrenceExtender::extend`].
pub fn extend_recurrence(fp: &PrimeField, init: &[Scalar], c: &[Scalar]) -> Result<Vec<Scalar>> {
    if init.len() != c.len() {
        return Err(dim_err("initial terms and coefficients differ in length"));
    }
    RecurrenceExtender::new(fp, c)?.extend(init)
}

/// Answers power queries about `A` from its Frobenius form.
///
/// Window `k` (columns `k-1 .. k+n-2`, zero-based) of `R` equals `U C^k`.
#[derive(Clone, Debug)]
pub struct PowerOracle {
    fp: PrimeField,
    form: FrobeniusForm,
    r: Matrix,
}

impl PowerOracle {
    /// Builds `R` by extending every row of `U` through the shared
    /// recurrence.
    pub fn new(fp: &PrimeField, form: FrobeniusForm) -> Result<Self> {
        let n = form.n;
        let ext = RecurrenceExtender::new(fp, &form.c)?;
        let mut r = Matrix::zeros(n, 2 * n - 1);
        for i in 0..n {
            let init = form.u.row(i);
            let tail = ext.extend(init)?;
            let row = r.row_mut(i);
            row[..n - 1].copy_from_slice(&init[1..]);
            row[n - 1..].copy_from_slice(&tail);
        }
        Ok(PowerOracle { fp: *fp, form, r })
    }

    pub fn field(&self) -> &PrimeField {
        &self.fp
    }

    pub fn form(&self) -> &FrobeniusForm {
        &self.form
    }

    pub fn into_form(self) -> FrobeniusForm {
        self.form
    }

    pub fn order(&self) -> usize {
        self.form.n
    }

    /// The auxiliary matrix `R` (`n x (2n-1)`).
    pub fn aux(&self) -> &Matrix {
        &self.r
    }

    /// `U C^k` for `1 <= k <= n`, read from `R`.
    pub fn window(&self, k: usize) -> Result<Matrix> {
        let n = self.order();
        if k == 0 || k > n {
            return Err(Error::IndexOutOfRange { index: k, size: n + 1 });
        }
        let cols: Vec<usize> = (k - 1..k - 1 + n).collect();
        let rows: Vec<usize> = (0..n).collect();
        Ok(self.r.submatrix(&rows, &cols))
    }

    fn check_h(&self, h: usize) -> Result<()> {
        if h > self.order() {
            return Err(Error::IndexOutOfRange {
                index: h,
                size: self.order() + 1,
            });
        }
        Ok(())
    }

    /// `(A^1)_{ij}, ..., (A^h)_{ij}` as one Hankel-vector product of row `i`
    /// of `R` with column `j` of `U^-1`. Requires `h <= n`.
    pub fn query_cell_powers(&self, i: usize, j: usize, h: usize) -> Result<Vec<Scalar>> {
        let n = self.order();
        check_index(i, n)?;
        check_index(j, n)?;
        self.check_h(h)?;
        let g = self.form.u_inv.column(j);
        Ok(hankel_apply(&self.fp, self.r.row(i), &g, h))
    }

    /// `v, Av, ..., A^(n-1) v`.
    pub fn vector_iterates_fast(&self, v: &[Scalar]) -> Result<Iterates> {
        let n = self.order();
        let w = self.form.u_inv.mul_vec(v, &self.fp)?;
        let mut vecs = vec![vec![Scalar::ZERO; n]; n];
        vecs[0] = v.to_vec();
        for i in 0..n {
            let coords = hankel_apply(&self.fp, self.r.row(i), &w, n - 1);
            for (k, x) in coords.into_iter().enumerate() {
                vecs[k + 1][i] = x;
            }
        }
        Ok(Iterates { vecs })
    }

    /// `(A^1)_{S,T}, ..., (A^h)_{S,T}` read from the product of packed
    /// polynomial matrices. Requires `1 <= h <= n`.
    pub fn query_submatrix_powers(&self, s: &[usize], t: &[usize], h: usize) -> Result<Vec<Matrix>> {
        let n = self.order();
        for &i in s.iter().chain(t) {
            check_index(i, n)?;
        }
        self.check_h(h)?;
        if h == 0 {
            return Ok(Vec::new());
        }
        let blocks = n.div_ceil(h);
        let width = 2 * n - 1;
        // p_{i,j}(x) = sum_{l=1}^{2h-1} r_{i, jh+l} x^l, one-based r
        let mut p_coeffs = vec![Matrix::zeros(s.len(), blocks); 2 * h];
        for (a, &i) in s.iter().enumerate() {
            let row = self.r.row(i);
            for j in 0..blocks {
                for l in 1..2 * h {
                    let col = j * h + l - 1;
                    if col < width {
                        p_coeffs[l].set(a, j, row[col]);
                    }
                }
            }
        }
        // q_{j,i}(x) = sum_{l=1}^{h} g_{jh+l, i} x^(h-l)
        let mut q_coeffs = vec![Matrix::zeros(blocks, t.len()); h];
        for j in 0..blocks {
            for l in 1..=h {
                let z = j * h + l - 1;
                if z >= n {
                    break;
                }
                let grow = self.form.u_inv.row(z);
                for (b, &col) in t.iter().enumerate() {
                    q_coeffs[h - l].set(j, b, grow[col]);
                }
            }
        }
        let cap = 2 * h - 1;
        let p = PolyMatrix::from_coeffs(s.len(), blocks, cap, p_coeffs)?;
        let q = PolyMatrix::from_coeffs(blocks, t.len(), cap, q_coeffs)?;
        // A^k is the coefficient of x^(k+h-1) in P Q
        polymat_middle_product(&self.fp, &p, &q, h)
    }
}

/// Alias for [`PowerOracle::new`].
pub fn build_power_oracle(fp: &PrimeField, form: FrobeniusForm) -> Result<PowerOracle> {
    PowerOracle::new(fp, form)
}
