mod common;

use common::*;
use fnf_oracles::matrix::{hankel_solve, hankel_vec_mul, mat_inv, mat_mul, HankelWindow, LuFactor};
use fnf_oracles::{Error, Matrix};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const P: u64 = 1_000_000_007;

fn dense_of(rows: usize, cols: usize, vals: &[u64]) -> Dense {
    (0..rows)
        .map(|i| (0..cols).map(|j| vals[(i * cols + j) % vals.len()] % P).collect())
        .collect()
}

proptest! {
    #[test]
    fn product_matches_reference(r in 1usize..12, k in 1usize..12, c in 1usize..12, vals in prop::collection::vec(any::<u64>(), 1..50)) {
        let fp = field(P);
        let a = dense_of(r, k, &vals);
        let b = dense_of(k, c, &vals[vals.len() / 2..].iter().chain(&vals).copied().collect::<Vec<_>>());
        let got = mat_mul(&fp, &to_matrix(&fp, &a), &to_matrix(&fp, &b)).unwrap();
        prop_assert_eq!(dense(&got), common::mat_mul(&a, &b, P));
    }

    #[test]
    fn inverse_exists_iff_full_rank(n in 1usize..9, seed in any::<u64>(), sparse in any::<bool>()) {
        let fp = field(P);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = Matrix::random(&fp, n, n, &mut rng);
        if sparse && n > 1 {
            let row0 = m.row(0).to_vec();
            m.row_mut(n - 1).copy_from_slice(&row0);
        }
        let d = dense(&m);
        match mat_inv(&fp, &m) {
            Some(inv) => {
                prop_assert_eq!(rank(d.clone(), P), n);
                prop_assert_eq!(common::mat_mul(&d, &dense(&inv), P), identity(n));
            }
            None => prop_assert!(rank(d, P) < n),
        }
    }

    #[test]
    fn lu_solve_satisfies_system(n in 1usize..10, seed in any::<u64>()) {
        let fp = field(P);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = Matrix::random(&fp, n, n, &mut rng);
        let b = fp.random_vec(&mut rng, n);
        if let Some(lu) = LuFactor::new(&m, &fp) {
            let x = lu.solve(&b, &fp);
            prop_assert_eq!(mat_vec(&dense(&m), &values(&x), P), values(&b));
        }
    }

    #[test]
    fn hankel_products_and_solves(n in 1usize..10, seed in any::<u64>()) {
        let fp = field(P);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let diag = fp.random_vec(&mut rng, 2 * n - 1);
        let h = HankelWindow::new(diag.clone()).unwrap();
        let full: Dense = (0..n).map(|i| (0..n).map(|j| diag[i + j].value()).collect()).collect();
        prop_assert_eq!(dense(&h.to_dense()), full.clone());
        let v = fp.random_vec(&mut rng, n);
        prop_assert_eq!(values(&hankel_vec_mul(&fp, &h, &v).unwrap()), mat_vec(&full, &values(&v), P));
        match hankel_solve(&fp, &h, &v).unwrap() {
            Some(x) => prop_assert_eq!(mat_vec(&full, &values(&x), P), values(&v)),
            None => prop_assert!(rank(full, P) < n),
        }
    }
}

#[test]
fn shape_errors() {
    let fp = field(P);
    assert!(matches!(
        Matrix::from_vec(2, 2, vec![]),
        Err(Error::DimensionMismatch(_))
    ));
    assert!(mat_mul(&fp, &Matrix::zeros(2, 3), &Matrix::zeros(2, 3)).is_err());
    assert!(HankelWindow::new(vec![fnf_oracles::Scalar::ONE; 4]).is_err());
    assert_eq!(mat_inv(&fp, &Matrix::zeros(3, 3)), None);
}

#[test]
fn transpose_and_submatrix() {
    let fp = field(P);
    let m = to_matrix(&fp, &vec![vec![1, 2, 3], vec![4, 5, 6]]);
    assert_eq!(dense(&m.transpose()), vec![vec![1, 4], vec![2, 5], vec![3, 6]]);
    assert_eq!(dense(&m.submatrix(&[1], &[2, 0])), vec![vec![6, 4]]);
}
