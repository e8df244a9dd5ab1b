mod common;

use common::*;
use fnf_oracles::polymat::{polymat_middle_product, polymat_mul};
use fnf_oracles::{Matrix, PolyMatrix};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const P: u64 = 998_244_353;

fn random_pm(rows: usize, cols: usize, terms: usize, rng: &mut ChaCha8Rng) -> PolyMatrix {
    let fp = field(P);
    let coeffs = (0..terms).map(|_| Matrix::random(&fp, rows, cols, rng)).collect();
    PolyMatrix::from_coeffs(rows, cols, terms.max(1) - 1, coeffs).unwrap()
}

/// Full product by coefficient convolution of dense matrices.
fn reference_product(p: &PolyMatrix, q: &PolyMatrix) -> Vec<Dense> {
    let a: Vec<Dense> = p.coeffs().iter().map(dense).collect();
    let b: Vec<Dense> = q.coeffs().iter().map(dense).collect();
    let (r, c) = (p.rows(), q.cols());
    let mut out = vec![vec![vec![0u64; c]; r]; a.len() + b.len()];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let z = common::mat_mul(x, y, P);
            for (row, zr) in out[i + j].iter_mut().zip(&z) {
                for (o, v) in row.iter_mut().zip(zr) {
                    *o = addm(*o, *v, P);
                }
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn truncated_product(r in 1usize..5, k in 1usize..5, c in 1usize..5, dp in 1usize..20, dq in 1usize..20, cap in 0usize..30, seed in any::<u64>()) {
        let fp = field(P);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_pm(r, k, dp, &mut rng);
        let q = random_pm(k, c, dq, &mut rng);
        let got = polymat_mul(&fp, &p, &q, cap).unwrap();
        let want = reference_product(&p, &q);
        for d in 0..=cap {
            let w = want.get(d).cloned().unwrap_or_else(|| vec![vec![0; c]; r]);
            prop_assert_eq!(dense(&got.coeff(d)), w, "coefficient {}", d);
        }
    }

    #[test]
    fn middle_product_is_a_window(r in 1usize..5, k in 1usize..6, c in 1usize..5, m in 1usize..24, extra in 0usize..4, seed in any::<u64>()) {
        let fp = field(P);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_pm(r, k, 2 * m + extra, &mut rng);
        let q = random_pm(k, c, m, &mut rng);
        let got = polymat_middle_product(&fp, &p, &q, m).unwrap();
        let want = reference_product(&p, &q);
        prop_assert_eq!(got.len(), m);
        for (i, g) in got.iter().enumerate() {
            prop_assert_eq!(dense(g), want[m + i].clone());
        }
    }
}

#[test]
fn middle_product_rejects_long_right_factor() {
    let fp = field(P);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = random_pm(2, 2, 8, &mut rng);
    let q = random_pm(2, 2, 5, &mut rng);
    assert!(polymat_middle_product(&fp, &p, &q, 4).is_err());
    assert!(polymat_mul(&fp, &p, &random_pm(3, 2, 2, &mut rng), 4).is_err());
}

#[test]
fn identity_and_shift() {
    let fp = field(P);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let p = random_pm(3, 3, 6, &mut rng);
    let id = PolyMatrix::identity(3, 5);
    assert_eq!(polymat_mul(&fp, &id, &p, 5).unwrap().coeffs(), p.coeffs());
    let s = p.shift(2);
    assert!(s.coeff(0).is_zero() && s.coeff(1).is_zero());
    assert_eq!(s.coeff(2), p.coeff(0));
    assert!(p.sub(&p, &fp).unwrap().is_zero());
}
