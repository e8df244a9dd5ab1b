//! Updating a Frobenius form after a rank-1 change, and reading powers of a
//! matrix after a batch of element changes.
//!
//! Powers of `B = A + U diag(delta) V` (element changes at positions
//! `(u_i, v_i)`) are obtained from the generating series
//! `(I - X B)^-1 = sum_k X^k B^k` over `F[X]/(X^(h+1))` by the
//! Sherman-Morrison-Woodbury identity
//!
//! ```text
//! (I - XB)^-1 = Z + (ZU) P (X diag(delta)) (VZ),   Z = (I - XA)^-1,
//! P = (I - X diag(delta) V Z U)^-1,
//! ```
//!
//! so only submatrices of powers of `A` are needed.

use std::collections::HashSet;

use rand::Rng;

use crate::error::{dim_err, Error, Result};
use crate::field::{PrimeField, Scalar};
use crate::frobenius::{default_max_attempts, fnf_from_iterates, FrobeniusForm, Iterates, PowerOracle};
use crate::matrix::Matrix;
use crate::polymat::{polymat_mul, PolyMatrix};

/// Default subproblem size below which [`perturbed_iterates`] evaluates the
/// recurrence directly.
pub const DIRECT_THRESHOLD: usize = 8;

const MIDDLE_PRODUCT_BASE: usize = 16;

/// Precomputed iterates for `(A + a b^T)^k u`: `delta[i] = A^i u`,
/// `alpha[i] = A^i a`.
#[derive(Clone, Debug)]
pub struct PerturbationContext {
    pub delta: Vec<Vec<Scalar>>,
    pub alpha: Vec<Vec<Scalar>>,
    pub b: Vec<Scalar>,
}

impl PerturbationContext {
    fn check(&self) -> Result<usize> {
        let n = self.b.len();
        if self.delta.len() != n || self.alpha.len() != n {
            return Err(dim_err("perturbation sequences must have n terms"));
        }
        if self.delta.iter().chain(&self.alpha).any(|v| v.len() != n) {
            return Err(dim_err("perturbation vectors must have length n"));
        }
        Ok(n)
    }
}

/// `X_0, ..., X_{n-1}` with `X_k = (A + a b^T)^k u`.
///
/// Uses `X_k = delta_k + sum_{l<k} alpha_{k-1-l} (b^T X_l)` and divides the
/// index range in halves: once the left half is final its contribution to the
/// right half is a Hankel product of the `alpha` sequence with the scalars
/// `b^T X_l`, computed as a middle product.
pub fn perturbed_iterates(fp: &PrimeField, ctx: &PerturbationContext) -> Result<Vec<Vec<Scalar>>> {
    perturbed_iterates_with(fp, ctx, DIRECT_THRESHOLD)
}

/// [`perturbed_iterates`] with an explicit direct-evaluation threshold.
pub fn perturbed_iterates_with(
    fp: &PrimeField,
    ctx: &PerturbationContext,
    threshold: usize,
) -> Result<Vec<Vec<Scalar>>> {
    let n = ctx.check()?;
    if n == 0 {
        return Ok(Vec::new());
    }
    // one contiguous sequence per coordinate; alpha zero-padded to 2n terms
    let mut alpha = vec![Scalar::ZERO; 2 * n * n];
    let mut x = vec![Scalar::ZERO; n * n];
    for k in 0..n {
        for i in 0..n {
            alpha[i * 2 * n + k] = ctx.alpha[k][i];
            x[i * n + k] = ctx.delta[k][i];
        }
    }
    let mut d = vec![Scalar::ZERO; n];
    let mut solver = Solver {
        fp,
        n,
        alpha: &alpha,
        b: &ctx.b,
        mp: MiddleProduct::new(fp),
        threshold: threshold.max(1),
    };
    solver.solve(&mut x, &mut d, 0, n - 1);
    Ok((0..n).map(|k| (0..n).map(|i| x[i * n + k]).collect()).collect())
}

struct Solver<'a> {
    fp: &'a PrimeField,
    n: usize,
    /// Coordinate `i` of `alpha_k` at `i * 2n + k`.
    alpha: &'a [Scalar],
    b: &'a [Scalar],
    mp: MiddleProduct<'a>,
    threshold: usize,
}

impl Solver<'_> {
    /// Finalizes `X_p..X_q`, given all contributions from indices below `p`.
    /// Coordinate `i` of `X_k` is `x[i * n + k]`.
    fn solve(&mut self, x: &mut [Scalar], d: &mut [Scalar], p: usize, q: usize) {
        let n = self.n;
        if q - p <= self.threshold {
            for j in p..=q {
                for i in 0..n {
                    let a = &self.alpha[i * 2 * n..];
                    let terms = (p..j).map(|k| (a[j - 1 - k], d[k]));
                    x[i * n + j] = self.fp.add(x[i * n + j], lazy_dot(self.fp, terms));
                }
                d[j] = lazy_dot(self.fp, (0..n).map(|i| (self.b[i], x[i * n + j])));
            }
            return;
        }
        let m = (p + q) / 2;
        self.solve(x, d, p, m);
        // X_{m+1+t} += sum_s alpha_{t+s} d_{m-s}
        let rows = q - m;
        let size = rows.max(m - p + 1);
        let mut w: Vec<Scalar> = (p..=m).rev().map(|i| d[i]).collect();
        w.resize(size, Scalar::ZERO);
        let mut out = vec![Scalar::ZERO; size];
        for i in 0..n {
            out.fill(Scalar::ZERO);
            let h = &self.alpha[i * 2 * n..i * 2 * n + 2 * size - 1];
            self.mp.run(0, h, &w, &mut out);
            for (xv, &c) in x[i * n + m + 1..i * n + q + 1].iter_mut().zip(&out) {
                *xv = self.fp.add(*xv, c);
            }
        }
        self.solve(x, d, m + 1, q);
    }
}

/// `sum a_i b_i` with lazy reduction.
#[inline]
fn lazy_dot(fp: &PrimeField, terms: impl Iterator<Item = (Scalar, Scalar)>) -> Scalar {
    let lazy = fp.lazy_terms();
    let mut acc: u128 = 0;
    let mut pending = 0;
    for (a, b) in terms {
        if pending == lazy {
            acc = fp.reduce_wide(acc).0 as u128;
            pending = 1;
        }
        acc += a.0 as u128 * b.0 as u128;
        pending += 1;
    }
    fp.reduce_wide(acc)
}

/// Transposed Karatsuba for `out_t += sum_s h_{t+s} w_s`, `t, s < size`.
/// Scratch buffers are kept per recursion depth.
struct MiddleProduct<'a> {
    fp: &'a PrimeField,
    scratch: Vec<[Vec<Scalar>; 3]>,
}

impl<'a> MiddleProduct<'a> {
    fn new(fp: &'a PrimeField) -> Self {
        MiddleProduct {
            fp,
            scratch: Vec::new(),
        }
    }

    fn base(&self, h: &[Scalar], w: &[Scalar], out: &mut [Scalar]) {
        let s = w.len();
        if self.fp.lazy_terms() > s {
            for (t, o) in out.iter_mut().enumerate() {
                let mut acc = o.0 as u128;
                for (a, b) in h[t..t + s].iter().zip(w) {
                    acc += a.0 as u128 * b.0 as u128;
                }
                *o = self.fp.reduce_wide(acc);
            }
        } else {
            for (t, o) in out.iter_mut().enumerate() {
                *o = self.fp.add(*o, self.fp.dot(&h[t..t + s], w));
            }
        }
    }

    fn run(&mut self, depth: usize, h: &[Scalar], w: &[Scalar], out: &mut [Scalar]) {
        let size = w.len();
        debug_assert_eq!(h.len(), 2 * size - 1);
        if size <= MIDDLE_PRODUCT_BASE || size % 2 == 1 && size <= 2 * MIDDLE_PRODUCT_BASE {
            return self.base(h, w, out);
        }
        if size % 2 == 1 {
            // peel the last row and column
            let k = size - 1;
            self.run(depth, &h[..2 * k - 1], &w[..k], &mut out[..k]);
            for (t, o) in out[..k].iter_mut().enumerate() {
                *o = self.fp.add(*o, self.fp.mul(h[t + k], w[k]));
            }
            return self.base(&h[k..], w, &mut out[k..]);
        }
        if self.scratch.len() <= depth {
            self.scratch.resize_with(depth + 1, Default::default);
        }
        let [mut ws, mut beta, mut diff] = std::mem::take(&mut self.scratch[depth]);
        let k = size / 2;
        let (w0, w1) = w.split_at(k);
        let (out0, out1) = out.split_at_mut(k);
        // blocks H00 = h[0..], H01 = H10 = h[k..], H11 = h[2k..], each 2k-1 long
        let h00 = &h[..2 * k - 1];
        let h01 = &h[k..3 * k - 1];
        let h11 = &h[2 * k..];
        let fp = self.fp;
        ws.clear();
        ws.extend(w0.iter().zip(w1).map(|(&a, &b)| fp.add(a, b)));
        beta.clear();
        beta.resize(k, Scalar::ZERO);
        self.run(depth + 1, h01, &ws, &mut beta);
        // out0 += beta + (H00 - H01) w0, out1 += beta + (H11 - H01) w1
        for (o, &b) in out0.iter_mut().zip(&beta).chain(out1.iter_mut().zip(&beta)) {
            *o = fp.add(*o, b);
        }
        diff.clear();
        diff.extend(h00.iter().zip(h01).map(|(&a, &b)| fp.sub(a, b)));
        self.run(depth + 1, &diff, w0, out0);
        for ((dv, &a), &b) in diff.iter_mut().zip(h11).zip(h01) {
            *dv = fp.sub(a, b);
        }
        self.run(depth + 1, &diff, w1, out1);
        self.scratch[depth] = [ws, beta, diff];
    }
}

/// `out_t = sum_s seq[t+s] * w[s]` for `t < rows`, with vector-valued `seq`.
/// Entries of `seq` past its end count as zero.
#[cfg(test)]
fn hankel_middle_product(fp: &PrimeField, seq: &[Vec<Scalar>], w: &[Scalar], rows: usize) -> Vec<Vec<Scalar>> {
    let lanes = seq.first().map_or(0, Vec::len);
    let size = rows.max(w.len());
    let mut wpad = w.to_vec();
    wpad.resize(size, Scalar::ZERO);
    let mut mp = MiddleProduct::new(fp);
    let mut out = vec![vec![Scalar::ZERO; lanes]; rows];
    for i in 0..lanes {
        let h: Vec<Scalar> = (0..2 * size - 1)
            .map(|t| seq.get(t).map_or(Scalar::ZERO, |v| v[i]))
            .collect();
        let mut o = vec![Scalar::ZERO; size];
        mp.run(0, &h, &wpad, &mut o);
        for (t, &v) in o.iter().take(rows).enumerate() {
            out[t][i] = v;
        }
    }
    out
}

/// Forms of `A + a b^T` and of its transpose, built from power oracles of
/// `A` and `A^T` without recomputing iterates from scratch.
///
/// Per attempt, random `u'` and `v'` are drawn; their iterates under `A`
/// and `A^T` come from the oracles and are corrected by
/// [`perturbed_iterates`]. The transposed matrix is `A^T + b a^T`, so the
/// roles of `a` and `b` swap on that side.
#[allow(clippy::too_many_arguments)]
pub fn rank1_update_fnf<R: Rng + ?Sized>(
    fp: &PrimeField,
    a_mat: &Matrix,
    oracle_a: &PowerOracle,
    oracle_at: &PowerOracle,
    a: &[Scalar],
    b: &[Scalar],
    rng: &mut R,
    max_attempts: Option<usize>,
) -> Result<(FrobeniusForm, FrobeniusForm)> {
    let n = a_mat.rows();
    if a.len() != n || b.len() != n || oracle_a.order() != n || oracle_at.order() != n {
        return Err(dim_err("rank-1 update operands"));
    }
    let mut updated = a_mat.clone();
    for (i, &ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (v, &bj) in updated.row_mut(i).iter_mut().zip(b) {
            *v = fp.add(*v, fp.mul(ai, bj));
        }
    }
    let updated_t = updated.transpose();
    let alpha = oracle_a.vector_iterates_fast(a)?.vecs;
    let alpha_t = oracle_at.vector_iterates_fast(b)?.vecs;
    let attempts = max_attempts.unwrap_or_else(|| default_max_attempts(n));
    for _ in 0..attempts {
        let u = fp.random_vec(rng, n);
        let v = fp.random_vec(rng, n);
        let ctx = PerturbationContext {
            delta: oracle_a.vector_iterates_fast(&u)?.vecs,
            alpha: alpha.clone(),
            b: b.to_vec(),
        };
        let ctx_t = PerturbationContext {
            delta: oracle_at.vector_iterates_fast(&v)?.vecs,
            alpha: alpha_t.clone(),
            b: a.to_vec(),
        };
        let iu = Iterates {
            vecs: perturbed_iterates(fp, &ctx)?,
        };
        let iv = Iterates {
            vecs: perturbed_iterates(fp, &ctx_t)?,
        };
        if let Ok(form) = fnf_from_iterates(fp, &updated, &iu, &iv)? {
            let form_t =
                fnf_from_iterates(fp, &updated_t, &iv, &iu)?.map_err(|_| Error::GenericityFailure { attempts })?;
            return Ok((form, form_t));
        }
    }
    Err(Error::GenericityFailure { attempts })
}

/// A change of one matrix entry from `old` to `new`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ElementChange {
    pub row: usize,
    pub col: usize,
    pub old: Scalar,
    pub new: Scalar,
}

impl ElementChange {
    pub fn delta(&self, fp: &PrimeField) -> Scalar {
        fp.sub(self.new, self.old)
    }
}

/// Row indices `u_i` and column indices `v_i` of a change list, in order.
pub fn change_endpoints(psi: &[ElementChange]) -> (Vec<usize>, Vec<usize>) {
    (psi.iter().map(|c| c.row).collect(), psi.iter().map(|c| c.col).collect())
}

/// Preprocessed batch of element changes.
#[derive(Clone, Debug)]
pub struct ElementUpdateBatch {
    fp: PrimeField,
    psi: Vec<ElementChange>,
    s: Vec<usize>,
    t: Vec<usize>,
    delta: Vec<Scalar>,
    /// `X diag(delta) V Z U`
    m: PolyMatrix,
    p: PolyMatrix,
    h: usize,
}

/// `I_{rows,cols} + sum_k x^k powers[k-1]` as a polynomial matrix.
fn series_from_powers(rows: &[usize], cols: &[usize], powers: &[Matrix], h: usize) -> Result<PolyMatrix> {
    if powers.len() != h {
        return Err(dim_err(format!("expected {h} power matrices, got {}", powers.len())));
    }
    let mut coeffs = Vec::with_capacity(h + 1);
    let mut id = Matrix::zeros(rows.len(), cols.len());
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            if r == c {
                id.set(i, j, Scalar::ONE);
            }
        }
    }
    coeffs.push(id);
    for m in powers {
        if m.rows() != rows.len() || m.cols() != cols.len() {
            return Err(dim_err("power matrix shape"));
        }
        coeffs.push(m.clone());
    }
    PolyMatrix::from_coeffs(rows.len(), cols.len(), h, coeffs)
}

/// Builds the batch from `(A^k)_{T,S}` for `k = 1..h`, where `T` lists the
/// change columns `v_i` and `S` the change rows `u_i` in the order of `psi`
/// (see [`change_endpoints`]).
pub fn batch_preprocess(
    fp: &PrimeField,
    powers_ts: &[Matrix],
    psi: &[ElementChange],
    h: usize,
) -> Result<ElementUpdateBatch> {
    if h == 0 {
        return Err(dim_err("power bound must be at least 1"));
    }
    let mut seen = HashSet::new();
    for c in psi {
        if !seen.insert((c.row, c.col)) {
            return Err(Error::DuplicatePosition(c.row, c.col));
        }
    }
    let (s, t) = change_endpoints(psi);
    let f = psi.len();
    let delta: Vec<Scalar> = psi.iter().map(|c| c.delta(fp)).collect();
    let vzu = series_from_powers(&t, &s, powers_ts, h)?;
    let m = vzu.scale_rows(&delta, fp)?.shift(1);
    // (I - M)^-1 = prod_{j=0}^{floor(log2 h)} (I + M^(2^j)), exact since M^(h+1) = 0
    let mut p = PolyMatrix::identity(f, h);
    let mut pow = m.clone();
    let mut covered = 1usize;
    loop {
        let factor = PolyMatrix::identity(f, h).add(&pow, fp)?;
        p = polymat_mul(fp, &p, &factor, h)?;
        covered *= 2;
        if covered > h {
            break;
        }
        pow = polymat_mul(fp, &pow, &pow, h)?;
    }
    Ok(ElementUpdateBatch {
        fp: *fp,
        psi: psi.to_vec(),
        s,
        t,
        delta,
        m,
        p,
        h,
    })
}

impl ElementUpdateBatch {
    pub fn changes(&self) -> &[ElementChange] {
        &self.psi
    }

    /// Change rows `u_i`.
    pub fn s(&self) -> &[usize] {
        &self.s
    }

    /// Change columns `v_i`.
    pub fn t(&self) -> &[usize] {
        &self.t
    }

    pub fn deltas(&self) -> &[Scalar] {
        &self.delta
    }

    pub fn h(&self) -> usize {
        self.h
    }

    /// `P = (I - X diag(delta) V Z U)^-1 mod X^(h+1)`.
    pub fn p(&self) -> &PolyMatrix {
        &self.p
    }

    /// Checks `P (I - X diag(delta) V Z U) = I mod X^(h+1)`.
    pub fn check_inverse(&self) -> bool {
        let f = self.psi.len();
        let Ok(lhs) = PolyMatrix::identity(f, self.h).sub(&self.m, &self.fp) else {
            return false;
        };
        polymat_mul(&self.fp, &self.p, &lhs, self.h)
            .map(|prod| prod == PolyMatrix::identity(f, self.h))
            .unwrap_or(false)
    }
}

/// `(B^k)_{X,Y}` for `k = 1..h`, where `B` is `A` with the batch applied.
///
/// Takes `(A^k)_{X,S}`, `(A^k)_{T,Y}` and `(A^k)_{X,Y}` for `k = 1..h` with
/// `S`, `T` ordered as in the batch.
pub fn batch_query(
    batch: &ElementUpdateBatch,
    x: &[usize],
    y: &[usize],
    powers_xs: &[Matrix],
    powers_ty: &[Matrix],
    powers_xy: &[Matrix],
) -> Result<Vec<Matrix>> {
    let h = batch.h;
    let fp = &batch.fp;
    if powers_xy.len() != h {
        return Err(dim_err("powers over X x Y"));
    }
    if batch.psi.is_empty() {
        return Ok(powers_xy.to_vec());
    }
    let z_xs = series_from_powers(x, &batch.s, powers_xs, h)?;
    let z_ty = series_from_powers(&batch.t, y, powers_ty, h)?;
    let z_xy = series_from_powers(x, y, powers_xy, h)?;
    let right = z_ty.scale_rows(&batch.delta, fp)?.shift(1);
    let corr = if x.len() <= y.len() {
        let left = polymat_mul(fp, &z_xs, &batch.p, h)?;
        polymat_mul(fp, &left, &right, h)?
    } else {
        let r = polymat_mul(fp, &batch.p, &right, h)?;
        polymat_mul(fp, &z_xs, &r, h)?
    };
    let total = z_xy.add(&corr, fp)?;
    Ok((1..=h).map(|k| total.coeff(k)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::naive_iterates;

    #[test]
    fn swap_perturbation() {
        let fp = PrimeField::new(101).unwrap();
        let a = Matrix::from_rows_u64(&fp, &[vec![0, 1], vec![1, 0]]).unwrap();
        let e1 = vec![Scalar::ONE, Scalar::ZERO];
        let e2 = vec![Scalar::ZERO, Scalar::ONE];
        let ctx = PerturbationContext {
            delta: naive_iterates(&fp, &a, &e1, 2).unwrap().vecs,
            alpha: naive_iterates(&fp, &a, &e1, 2).unwrap().vecs,
            b: e2.clone(),
        };
        let x = perturbed_iterates(&fp, &ctx).unwrap();
        assert_eq!(x, vec![e1, e2]);
    }

    #[test]
    fn middle_product_matches_direct_sum() {
        let fp = PrimeField::new(1_000_003).unwrap();
        let seq: Vec<Vec<Scalar>> = (0..40u64)
            .map(|i| vec![fp.elem(i * i + 1), fp.elem(3 * i + 7)])
            .collect();
        for (size, rows) in [(1, 1), (5, 4), (9, 9), (13, 12), (20, 20), (17, 16)] {
            let w: Vec<Scalar> = (0..size as u64).map(|i| fp.elem(5 * i + 2)).collect();
            let got = hankel_middle_product(&fp, &seq, &w, rows);
            for (t, g) in got.iter().enumerate() {
                for lane in 0..2 {
                    let mut e = Scalar::ZERO;
                    for (s, &ws) in w.iter().enumerate() {
                        if let Some(v) = seq.get(t + s) {
                            e = fp.add(e, fp.mul(v[lane], ws));
                        }
                    }
                    assert_eq!(g[lane], e, "size {size} row {t}");
                }
            }
        }
    }

    #[test]
    fn single_change_on_nilpotent() {
        // A = [[0,1],[0,0]], set (2,1) to 1: B = [[0,1],[1,0]]
        let fp = PrimeField::new(101).unwrap();
        let a = Matrix::from_rows_u64(&fp, &[vec![0, 1], vec![0, 0]]).unwrap();
        let psi = [ElementChange {
            row: 1,
            col: 0,
            old: Scalar::ZERO,
            new: Scalar::ONE,
        }];
        let powers = [a.clone(), Matrix::zeros(2, 2)];
        let pick = |rows: &[usize], cols: &[usize]| -> Vec<Matrix> {
            powers.iter().map(|m| m.submatrix(rows, cols)).collect()
        };
        let batch = batch_preprocess(&fp, &pick(&[0], &[1]), &psi, 2).unwrap();
        assert!(batch.check_inverse());
        let out = batch_query(
            &batch,
            &[0],
            &[0],
            &pick(&[0], &[1]),
            &pick(&[0], &[0]),
            &pick(&[0], &[0]),
        )
        .unwrap();
        assert_eq!(out[0].get(0, 0), Scalar::ZERO);
        assert_eq!(out[1].get(0, 0), Scalar::ONE);
    }

    #[test]
    fn duplicate_positions_rejected() {
        let fp = PrimeField::new(101).unwrap();
        let c = ElementChange {
            row: 0,
            col: 1,
            old: Scalar::ZERO,
            new: Scalar::ONE,
        };
        let powers = vec![Matrix::zeros(2, 2)];
        assert_eq!(
            batch_preprocess(&fp, &powers, &[c, c], 1).unwrap_err(),
            Error::DuplicatePosition(0, 1)
        );
    }
}
