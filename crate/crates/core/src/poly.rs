//! Dense univariate polynomials over a [`PrimeField`], optionally truncated
//! modulo `x^(cap+1)`.
//!
//! Multiplication is tiered: schoolbook below [`KARATSUBA_THRESHOLD`]
//! coefficients, Karatsuba above. Both work directly over the (generally not
//! transform-friendly) sampled prime.

use crate::error::{Error, Result};
use crate::field::{PrimeField, Scalar};

/// Operands shorter than this are multiplied by the schoolbook method.
pub const KARATSUBA_THRESHOLD: usize = 32;

/// A polynomial `coeffs[0] + coeffs[1] x + ...`.
///
/// The zero polynomial has no coefficients. When `cap` is set the polynomial
/// lives in `F[x]/(x^(cap+1))`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<Scalar>,
    cap: Option<usize>,
}

impl Poly {
    pub fn new(coeffs: Vec<Scalar>) -> Self {
        let mut p = Poly { coeffs, cap: None };
        p.normalize();
        p
    }

    pub fn with_cap(coeffs: Vec<Scalar>, cap: usize) -> Self {
        let mut p = Poly { coeffs, cap: Some(cap) };
        p.normalize();
        p
    }

    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::new(vec![Scalar::ONE])
    }

    pub fn from_u64(fp: &PrimeField, coeffs: &[u64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| fp.elem(c)).collect())
    }

    fn normalize(&mut self) {
        if let Some(cap) = self.cap {
            self.coeffs.truncate(cap + 1);
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn cap(&self) -> Option<usize> {
        self.cap
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(i).copied().unwrap_or(Scalar::ZERO)
    }

    pub fn mul(&self, other: &Poly, fp: &PrimeField) -> Poly {
        let cap = match (self.cap, other.cap) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let mut coeffs = mul(fp, &self.coeffs, &other.coeffs);
        if let Some(cap) = cap {
            coeffs.truncate(cap + 1);
        }
        let mut p = Poly { coeffs, cap };
        p.normalize();
        p
    }

    pub fn add(&self, other: &Poly, fp: &PrimeField) -> Poly {
        let mut coeffs = self.coeffs.clone();
        add_assign(fp, &mut coeffs, &other.coeffs);
        let cap = match (self.cap, other.cap) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let mut p = Poly { coeffs, cap };
        p.normalize();
        p
    }

    /// Power series inverse modulo `x^(k+1)`.
    pub fn series_inv(&self, k: usize, fp: &PrimeField) -> Result<Poly> {
        Ok(Poly::with_cap(series_inv(fp, &self.coeffs, k + 1)?, k))
    }
}

/// `acc += b`, growing `acc` as needed.
pub fn add_assign(fp: &PrimeField, acc: &mut Vec<Scalar>, b: &[Scalar]) {
    if acc.len() < b.len() {
        acc.resize(b.len(), Scalar::ZERO);
    }
    for (x, &y) in acc.iter_mut().zip(b) {
        *x = fp.add(*x, y);
    }
}

/// Full product of two coefficient slices (length `a.len() + b.len() - 1`,
/// empty when either operand is empty).
pub fn mul(fp: &PrimeField, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Scalar::ZERO; a.len() + b.len() - 1];
    mul_into(fp, a, b, &mut out);
    out
}

/// Product truncated to its first `len` coefficients.
pub fn mul_truncated(fp: &PrimeField, a: &[Scalar], b: &[Scalar], len: usize) -> Vec<Scalar> {
    let a = &a[..a.len().min(len)];
    let b = &b[..b.len().min(len)];
    let mut out = mul(fp, a, b);
    out.truncate(len);
    out.resize(len, Scalar::ZERO);
    out
}

/// Adds `a * b` into `out` (which must hold at least `a.len() + b.len() - 1`
/// coefficients).
fn mul_into(fp: &PrimeField, a: &[Scalar], b: &[Scalar], out: &mut [Scalar]) {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if short.len() < KARATSUBA_THRESHOLD {
        schoolbook_into(fp, short, long, out);
        return;
    }
    if short.len() == long.len() {
        let prod = karatsuba(fp, short, long);
        for (o, p) in out.iter_mut().zip(prod) {
            *o = fp.add(*o, p);
        }
        return;
    }
    // unbalanced: cut the long operand into blocks of the short length
    let s = short.len();
    for (i, block) in long.chunks(s).enumerate() {
        mul_into(fp, short, block, &mut out[i * s..]);
    }
}

fn schoolbook_into(fp: &PrimeField, a: &[Scalar], b: &[Scalar], out: &mut [Scalar]) {
    let len = a.len() + b.len() - 1;
    let mut acc = vec![0u128; len];
    let lazy = fp.lazy_terms();
    // each acc slot receives at most one product per row of `a`
    for (rows_done, chunk) in a.chunks(lazy.max(1)).enumerate() {
        let base = rows_done * lazy.max(1);
        for (di, &x) in chunk.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let x = x.0 as u128;
            let row = &mut acc[base + di..base + di + b.len()];
            for (slot, y) in row.iter_mut().zip(b) {
                *slot += x * y.0 as u128;
            }
        }
        if chunk.len() == lazy {
            for slot in acc.iter_mut() {
                *slot = fp.reduce_wide(*slot).0 as u128;
            }
        }
    }
    for (o, v) in out.iter_mut().zip(acc) {
        *o = fp.add(*o, fp.reduce_wide(v));
    }
}

fn karatsuba(fp: &PrimeField, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let n = a.len();
    debug_assert_eq!(n, b.len());
    if n < KARATSUBA_THRESHOLD {
        let mut out = vec![Scalar::ZERO; 2 * n - 1];
        schoolbook_into(fp, a, b, &mut out);
        return out;
    }
    let h = n / 2;
    let (a0, a1) = a.split_at(h);
    let (b0, b1) = b.split_at(h);
    let z0 = karatsuba(fp, a0, b0);
    let z2 = karatsuba(fp, a1, b1);
    // a1 is at least as long as a0
    let mut sa = a1.to_vec();
    let mut sb = b1.to_vec();
    for i in 0..h {
        sa[i] = fp.add(sa[i], a0[i]);
        sb[i] = fp.add(sb[i], b0[i]);
    }
    let mut z1 = karatsuba(fp, &sa, &sb);
    for (i, &v) in z0.iter().enumerate() {
        z1[i] = fp.sub(z1[i], v);
    }
    for (i, &v) in z2.iter().enumerate() {
        z1[i] = fp.sub(z1[i], v);
    }
    let mut out = vec![Scalar::ZERO; 2 * n - 1];
    out[..z0.len()].copy_from_slice(&z0);
    for (i, &v) in z2.iter().enumerate() {
        out[2 * h + i] = v;
    }
    for (i, &v) in z1.iter().enumerate() {
        out[h + i] = fp.add(out[h + i], v);
    }
    out
}

/// Power series inverse of `f` modulo `x^len` by Newton iteration.
pub fn series_inv(fp: &PrimeField, f: &[Scalar], len: usize) -> Result<Vec<Scalar>> {
    let f0 = f.first().copied().unwrap_or(Scalar::ZERO);
    if f0.is_zero() {
        return Err(Error::NotInvertibleSeries);
    }
    let mut g = vec![fp.inv(f0)?];
    let mut prec = 1;
    while prec < len {
        prec = (2 * prec).min(len);
        // g <- g * (2 - f g) mod x^prec
        let fg = mul_truncated(fp, f, &g, prec);
        let mut corr: Vec<Scalar> = fg.iter().map(|&c| fp.neg(c)).collect();
        corr[0] = fp.add(corr[0], fp.elem(2));
        g = mul_truncated(fp, &g, &corr, prec);
    }
    g.truncate(len);
    g.resize(len, Scalar::ZERO);
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f101() -> PrimeField {
        PrimeField::new(101).unwrap()
    }

    #[test]
    fn small_products() {
        let fp = f101();
        let one_x = Poly::from_u64(&fp, &[1, 1]);
        assert!(Poly::zero().mul(&one_x, &fp).is_zero());
        assert_eq!(one_x.mul(&one_x, &fp), Poly::from_u64(&fp, &[1, 2, 1]));
        let capped = Poly::with_cap(one_x.coeffs().to_vec(), 1);
        assert_eq!(capped.mul(&one_x, &fp).coeffs(), &[Scalar(1), Scalar(2)]);
    }

    #[test]
    fn series_inverse_examples() {
        let fp = f101();
        assert_eq!(Poly::one().series_inv(5, &fp).unwrap().coeffs(), &[Scalar(1)]);
        let one_minus_x = Poly::from_u64(&fp, &[1, 100]);
        assert_eq!(
            one_minus_x.series_inv(3, &fp).unwrap(),
            Poly::with_cap(vec![Scalar(1); 4], 3)
        );
        let one_plus_x = Poly::from_u64(&fp, &[1, 1]);
        assert_eq!(
            one_plus_x.series_inv(2, &fp).unwrap().coeffs(),
            &[Scalar(1), Scalar(100), Scalar(1)]
        );
        assert_eq!(
            Poly::from_u64(&fp, &[0, 1]).series_inv(2, &fp),
            Err(Error::NotInvertibleSeries)
        );
    }

    #[test]
    fn karatsuba_matches_schoolbook_on_uneven_lengths() {
        let fp = PrimeField::new(1_000_000_007).unwrap();
        let a: Vec<Scalar> = (0..97u64).map(|i| fp.elem(i * i + 3)).collect();
        let b: Vec<Scalar> = (0..250u64).map(|i| fp.elem(7 * i + 1)).collect();
        let fast = mul(&fp, &a, &b);
        let mut slow = vec![Scalar::ZERO; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                slow[i + j] = fp.add(slow[i + j], fp.mul(x, y));
            }
        }
        assert_eq!(fast, slow);
    }
}
