mod common;

use common::*;
use fnf_oracles::field::{is_prime_u64, miller_rabin, modulus_lower_bound, sample_prime};
use fnf_oracles::{Error, PrimeField};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PRIMES: [u64; 5] = [3, 65_537, 1_000_000_007, (1 << 61) - 1, 9_223_372_036_854_775_783];

fn trial_division(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

proptest! {
    #[test]
    fn ring_ops_match_wide_arithmetic(pi in 0usize..5, a in any::<u64>(), b in any::<u64>()) {
        let p = PRIMES[pi];
        let fp = field(p);
        let (x, y) = (fp.elem(a), fp.elem(b));
        prop_assert_eq!(x.value(), a % p);
        prop_assert_eq!(fp.add(x, y).value(), addm(a % p, b % p, p));
        prop_assert_eq!(fp.sub(x, y).value(), subm(a % p, b % p, p));
        prop_assert_eq!(fp.mul(x, y).value(), mulm(a % p, b % p, p));
        prop_assert_eq!(fp.add(fp.neg(x), x).value(), 0);
    }

    #[test]
    fn inverse_and_power(pi in 0usize..5, a in 1u64.., e in 0u64..1000) {
        let p = PRIMES[pi];
        let fp = field(p);
        let x = fp.elem(a);
        prop_assert_eq!(fp.pow(x, e).value(), powm(a, e, p));
        if x.is_zero() {
            prop_assert_eq!(fp.inv(x), Err(Error::ZeroInverse));
        } else {
            prop_assert_eq!(fp.mul(x, fp.inv(x).unwrap()).value(), 1);
        }
    }

    #[test]
    fn dot_matches_wide_sum(pi in 0usize..5, xs in prop::collection::vec(any::<u64>(), 0..300)) {
        let p = PRIMES[pi];
        let fp = field(p);
        let a: Vec<_> = xs.iter().map(|&x| fp.elem(x)).collect();
        let b: Vec<_> = xs.iter().rev().map(|&x| fp.elem(x ^ 0x5555)).collect();
        let want = a.iter().zip(&b).fold(0u64, |acc, (x, y)| addm(acc, mulm(x.value(), y.value(), p), p));
        prop_assert_eq!(fp.dot(&a, &b).value(), want);
    }

    #[test]
    fn signed_embedding(pi in 0usize..5, x in any::<i64>()) {
        let p = PRIMES[pi];
        let want = (x as i128).rem_euclid(p as i128) as u64;
        prop_assert_eq!(field(p).from_i64(x).value(), want);
    }

    #[test]
    fn primality_agrees_with_trial_division(n in 0u64..200_000) {
        prop_assert_eq!(is_prime_u64(n), trial_division(n));
        let mut rng = ChaCha8Rng::seed_from_u64(n);
        prop_assert_eq!(miller_rabin(n, 20, &mut rng), trial_division(n));
    }
}

#[test]
fn modulus_validation() {
    for bad in [0, 1, 2, 4, 9, 1 << 63, u64::MAX] {
        assert_eq!(PrimeField::new(bad), Err(Error::InvalidModulus(bad)), "{bad}");
    }
    for p in PRIMES {
        assert_eq!(field(p).modulus(), p);
    }
}

#[test]
fn sampled_primes_lie_in_range() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (n, c) in [(1, 1), (10, 1), (40, 1), (100, 2), (1000, 3), (100_000, 4)] {
        let lo = modulus_lower_bound(n, c);
        let p = sample_prime(n, c, &mut rng).modulus();
        assert!(lo <= p && p <= 2 * lo, "n={n} c={c} p={p}");
        assert!(is_prime_u64(p));
        assert!(p < 1 << 63);
    }
    assert_eq!(modulus_lower_bound(10, 1), 1 << 20);
    assert_eq!(modulus_lower_bound(40, 1), 40u64.pow(5));
    assert_eq!(modulus_lower_bound(100_000, 4), 1 << 62);
}

#[test]
fn sampling_is_seeded() {
    let a = sample_prime(50, 1, &mut ChaCha8Rng::seed_from_u64(9));
    let b = sample_prime(50, 1, &mut ChaCha8Rng::seed_from_u64(9));
    assert_eq!(a, b);
}
