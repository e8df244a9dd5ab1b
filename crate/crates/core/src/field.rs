//! Arithmetic in the prime field Z/pZ for a runtime prime `p < 2^63`.
//!
//! Elements are plain canonical residues wrapped in [`Scalar`]; every
//! operation goes through a [`PrimeField`] context. Hot loops (dot products,
//! matrix and polynomial products) accumulate unreduced 126-bit products in a
//! `u128` and reduce only when the accumulator could overflow.

use rand::Rng;

use crate::error::{Error, Result};

/// Number of Miller-Rabin rounds used when sampling a modulus.
pub const PRIMALITY_ROUNDS: usize = 40;

/// Lower bound on sampled moduli, independent of the problem size.
pub const MIN_MODULUS: u64 = 1 << 20;

const MAX_MODULUS_BITS: u32 = 63;

/// A canonical residue in `[0, p)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(transparent)]
pub struct Scalar(pub(crate) u64);

impl Scalar {
    pub const ZERO: Scalar = Scalar(0);
    pub const ONE: Scalar = Scalar(1);

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::fmt::Display for Scalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The field Z/pZ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
    /// How many products `(p-1)^2` can be added to a reduced `u128` value
    /// without overflow.
    lazy_terms: usize,
    /// `p` shifted so its top bit is set, the shift, and
    /// `floor((2^128 - 1) / d) - 2^64` for two-word division by `d`.
    norm: u64,
    shift: u32,
    recip: u64,
}

impl PrimeField {
    /// Wraps `p` after checking it is an odd prime below `2^63`.
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p.is_multiple_of(2) || p >> MAX_MODULUS_BITS != 0 || !is_prime_u64(p) {
            return Err(Error::InvalidModulus(p));
        }
        Ok(Self::new_unchecked(p))
    }

    pub(crate) fn new_unchecked(p: u64) -> Self {
        let sq = (p as u128 - 1) * (p as u128 - 1);
        let lazy = (u128::MAX - p as u128) / sq.max(1);
        let shift = p.leading_zeros();
        let norm = p << shift;
        let recip = (u128::MAX / norm as u128 - (1u128 << 64)) as u64;
        PrimeField {
            p,
            lazy_terms: lazy.min(usize::MAX as u128) as usize,
            norm,
            shift,
            recip,
        }
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub(crate) fn lazy_terms(&self) -> usize {
        self.lazy_terms
    }

    /// Reduces an arbitrary integer into the field.
    #[inline]
    pub fn elem(&self, x: u64) -> Scalar {
        Scalar(x % self.p)
    }

    pub fn from_i64(&self, x: i64) -> Scalar {
        let r = x.rem_euclid(self.p as i64);
        Scalar(r as u64)
    }

    #[inline]
    pub fn add(&self, a: Scalar, b: Scalar) -> Scalar {
        let s = a.0 + b.0;
        Scalar(if s >= self.p { s - self.p } else { s })
    }

    #[inline]
    pub fn sub(&self, a: Scalar, b: Scalar) -> Scalar {
        Scalar(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + self.p - b.0 })
    }

    #[inline]
    pub fn neg(&self, a: Scalar) -> Scalar {
        Scalar(if a.0 == 0 { 0 } else { self.p - a.0 })
    }

    #[inline]
    pub fn mul(&self, a: Scalar, b: Scalar) -> Scalar {
        self.reduce_wide(a.0 as u128 * b.0 as u128)
    }

    /// `x mod p` by division with a precomputed reciprocal (Moller and
    /// Granlund), avoiding a 128-bit division.
    #[inline]
    pub(crate) fn reduce_wide(&self, x: u128) -> Scalar {
        let mut hi = (x >> 64) as u64;
        let lo = x as u64;
        if hi >= self.p {
            hi %= self.p;
        }
        // shift >= 1 because p < 2^63
        let u1 = (hi << self.shift) | (lo >> (64 - self.shift));
        let u0 = lo << self.shift;
        let q = (self.recip as u128 * u1 as u128).wrapping_add(((u1 as u128) << 64) | u0 as u128);
        let q1 = ((q >> 64) as u64).wrapping_add(1);
        let q0 = q as u64;
        let mut r = u0.wrapping_sub(q1.wrapping_mul(self.norm));
        if r > q0 {
            r = r.wrapping_add(self.norm);
        }
        if r >= self.norm {
            r -= self.norm;
        }
        Scalar(r >> self.shift)
    }

    pub fn pow(&self, mut base: Scalar, mut exp: u64) -> Scalar {
        let mut acc = Scalar::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(&self, a: Scalar) -> Result<Scalar> {
        if a.0 == 0 {
            return Err(Error::ZeroInverse);
        }
        let (mut r0, mut r1) = (self.p as i128, a.0 as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(Scalar(t0.rem_euclid(self.p as i128) as u64))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        Scalar(rng.gen_range(0..self.p))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        Scalar(rng.gen_range(1..self.p))
    }

    pub fn random_vec<R: Rng + ?Sized>(&self, rng: &mut R, len: usize) -> Vec<Scalar> {
        (0..len).map(|_| self.random(rng)).collect()
    }

    /// Inner product with lazy reduction.
    pub fn dot(&self, a: &[Scalar], b: &[Scalar]) -> Scalar {
        debug_assert_eq!(a.len(), b.len());
        let mut acc: u128 = 0;
        for (ca, cb) in a.chunks(self.lazy_terms).zip(b.chunks(self.lazy_terms)) {
            for (x, y) in ca.iter().zip(cb) {
                acc += x.0 as u128 * y.0 as u128;
            }
            acc = self.reduce_wide(acc).0 as u128;
        }
        Scalar(acc as u64)
    }
}

/// Samples a prime in `[L, 2L]` with `L = max(n^(4+c), 2^20)`.
///
/// `L` is clamped to `2^62` so the result stays below `2^63`. Candidates are
/// drawn uniformly from the odd integers in range and accepted after
/// [`PRIMALITY_ROUNDS`] Miller-Rabin rounds with random bases.
pub fn sample_prime<R: Rng + ?Sized>(n: usize, c: u32, rng: &mut R) -> PrimeField {
    let lower = modulus_lower_bound(n, c);
    loop {
        let cand = rng.gen_range(lower..=2 * lower) | 1;
        if cand <= 2 * lower && miller_rabin(cand, PRIMALITY_ROUNDS, rng) {
            return PrimeField::new_unchecked(cand);
        }
    }
}

/// `max(n^(4+c), 2^20)`, clamped to `2^62`.
pub fn modulus_lower_bound(n: usize, c: u32) -> u64 {
    let cap: u128 = 1 << (MAX_MODULUS_BITS - 1);
    let mut v: u128 = 1;
    for _ in 0..(4 + c) {
        v = v.saturating_mul(n.max(1) as u128).min(cap);
    }
    (v.max(MIN_MODULUS as u128).min(cap)) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    acc
}

fn mr_witness(n: u64, a: u64) -> bool {
    // true when `a` proves `n` composite
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return false;
    }
    for _ in 1..s {
        x = ((x as u128 * x as u128) % n as u128) as u64;
        if x == n - 1 {
            return false;
        }
    }
    true
}

/// Probabilistic Miller-Rabin test with `rounds` random bases.
pub fn miller_rabin<R: Rng + ?Sized>(n: u64, rounds: usize, rng: &mut R) -> bool {
    if n < 4 {
        return n == 2 || n == 3;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    (0..rounds).all(|_| !mr_witness(n, rng.gen_range(2..n - 1)))
}

/// Deterministic primality for 64-bit integers (fixed witness set).
pub fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    BASES.iter().all(|&a| !mr_witness(n, a))
}
