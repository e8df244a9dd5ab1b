mod common;

use common::*;
use fnf_oracles::frobenius::{compute_fnf, naive_iterates, PowerOracle};
use fnf_oracles::polymat::polymat_mul;
use fnf_oracles::updates::{
    batch_preprocess, batch_query, perturbed_iterates, perturbed_iterates_with, rank1_update_fnf, ElementChange,
    PerturbationContext,
};
use fnf_oracles::{Error, Matrix, PolyMatrix, Scalar};
use proptest::prelude::*;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const P: u64 = 1_000_000_007;

fn rank1_dense(a: &Dense, u: &[u64], v: &[u64]) -> Dense {
    a.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &x)| addm(x, mulm(u[i], v[j], P), P))
                .collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn perturbed_iterates_match_explicit_matrix(n in 1usize..70, threshold in 1usize..20, seed in any::<u64>()) {
        let fp = field(P);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Matrix::random(&fp, n, n, &mut rng);
        let (u, av, b) = (fp.random_vec(&mut rng, n), fp.random_vec(&mut rng, n), fp.random_vec(&mut rng, n));
        let ctx = PerturbationContext {
            delta: naive_iterates(&fp, &a, &u, n).unwrap().vecs,
            alpha: naive_iterates(&fp, &a, &av, n).unwrap().vecs,
            b: b.clone(),
        };
        let want = iterates(&rank1_dense(&dense(&a), &values(&av), &values(&b)), &values(&u), n, P);
        let got: Vec<Vec<u64>> = perturbed_iterates_with(&fp, &ctx, threshold).unwrap().iter().map(|x| values(x)).collect();
        prop_assert_eq!(&got, &want);
        let default: Vec<Vec<u64>> = perturbed_iterates(&fp, &ctx).unwrap().iter().map(|x| values(x)).collect();
        prop_assert_eq!(default, want);
    }

    #[test]
    fn rank1_update_yields_valid_forms(n in 2usize..14, seed in any::<u64>()) {
        let fp = field(P);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Matrix::random(&fp, n, n, &mut rng);
        let oa = PowerOracle::new(&fp, compute_fnf(&fp, &a, &mut rng, None).unwrap()).unwrap();
        let oat = PowerOracle::new(&fp, compute_fnf(&fp, &a.transpose(), &mut rng, None).unwrap()).unwrap();
        let (x, y) = (fp.random_vec(&mut rng, n), fp.random_vec(&mut rng, n));
        let updated = rank1_dense(&dense(&a), &values(&x), &values(&y));
        prop_assume!(is_generic(&updated, P));
        let (form, form_t) = rank1_update_fnf(&fp, &a, &oa, &oat, &x, &y, &mut rng, None).unwrap();
        let m = to_matrix(&fp, &updated);
        prop_assert!(form.is_valid_for(&fp, &m));
        prop_assert!(form_t.is_valid_for(&fp, &m.transpose()));
        let c = companion(&values(form.charpoly_coeffs()), P);
        prop_assert_eq!(common::mat_mul(&updated, &dense(form.u()), P), common::mat_mul(&dense(form.u()), &c, P));
        prop_assert_eq!(values(form.charpoly_coeffs()), charpoly(&updated, P));
        prop_assert_eq!(values(form_t.charpoly_coeffs()), charpoly(&updated, P));
    }

    #[test]
    fn batch_matches_explicit_update(n in 2usize..20, f in 1usize..6, h in 1usize..10, seed in any::<u64>()) {
        let fp = field(P);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Matrix::random(&fp, n, n, &mut rng);
        let da = dense(&a);
        let cells = sample(&mut rng, n * n, f.min(n * n)).into_vec();
        let psi: Vec<ElementChange> = cells
            .iter()
            .map(|&c| ElementChange { row: c / n, col: c % n, old: a.get(c / n, c % n), new: fp.random(&mut rng) })
            .collect();
        let mut db = da.clone();
        for c in &psi {
            db[c.row][c.col] = c.new.value();
        }
        let pa = powers(&da, h, P);
        let pb = powers(&db, h, P);
        let pick = |rows: &[usize], cols: &[usize]| -> Vec<Matrix> {
            pa.iter().map(|m| to_matrix(&fp, &sub_block(m, rows, cols))).collect()
        };
        let s: Vec<usize> = psi.iter().map(|c| c.row).collect();
        let t: Vec<usize> = psi.iter().map(|c| c.col).collect();
        let batch = batch_preprocess(&fp, &pick(&t, &s), &psi, h).unwrap();
        prop_assert!(batch.check_inverse());

        // (I - M) P = I mod x^(h+1), with M = x D (I_{T,S} + sum_k (A^k)_{T,S} x^k)
        let f = psi.len();
        let mut mc = vec![Matrix::zeros(f, f)];
        for k in 0..h {
            let mut m = Matrix::zeros(f, f);
            for i in 0..f {
                for j in 0..f {
                    let z = if k == 0 { u64::from(t[i] == s[j]) } else { pa[k - 1][t[i]][s[j]] };
                    m.set(i, j, fp.elem(mulm(psi[i].delta(&fp).value(), z, P)));
                }
            }
            mc.push(m);
        }
        let m = PolyMatrix::from_coeffs(f, f, h, mc).unwrap();
        let lhs = PolyMatrix::identity(f, h).sub(&m, &fp).unwrap();
        let prod = polymat_mul(&fp, &lhs, batch.p(), h).unwrap();
        for k in 0..=h {
            let want = if k == 0 { identity(f) } else { vec![vec![0; f]; f] };
            prop_assert_eq!(dense(&prod.coeff(k)), want);
        }

        let kx = rng.gen_range(1..=n);
        let x = sample(&mut rng, n, kx).into_vec();
        let ky = rng.gen_range(1..=n);
        let y = sample(&mut rng, n, ky).into_vec();
        let got = batch_query(&batch, &x, &y, &pick(&x, &s), &pick(&t, &y), &pick(&x, &y)).unwrap();
        for k in 0..h {
            prop_assert_eq!(dense(&got[k]), sub_block(&pb[k], &x, &y), "k={}", k + 1);
        }
    }
}

#[test]
fn context_shape_errors() {
    let fp = field(P);
    let ctx = PerturbationContext {
        delta: vec![vec![Scalar::ZERO; 3]; 2],
        alpha: vec![vec![Scalar::ZERO; 3]; 3],
        b: vec![Scalar::ZERO; 3],
    };
    assert!(matches!(
        perturbed_iterates(&fp, &ctx),
        Err(Error::DimensionMismatch(_))
    ));
    let empty = PerturbationContext {
        delta: vec![],
        alpha: vec![],
        b: vec![],
    };
    assert!(perturbed_iterates(&fp, &empty).unwrap().is_empty());
    assert!(batch_preprocess(&fp, &[], &[], 0).is_err());
}

#[test]
fn zero_perturbation_keeps_charpoly() {
    let fp = field(P);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = 8;
    let a = Matrix::random(&fp, n, n, &mut rng);
    let oa = PowerOracle::new(&fp, compute_fnf(&fp, &a, &mut rng, None).unwrap()).unwrap();
    let oat = PowerOracle::new(&fp, compute_fnf(&fp, &a.transpose(), &mut rng, None).unwrap()).unwrap();
    let zero = vec![Scalar::ZERO; n];
    let x = fp.random_vec(&mut rng, n);
    let (form, _) = rank1_update_fnf(&fp, &a, &oa, &oat, &x, &zero, &mut rng, None).unwrap();
    assert_eq!(form.charpoly_coeffs(), oa.form().charpoly_coeffs());
    assert!(rank1_update_fnf(&fp, &a, &oa, &oat, &x[1..], &zero, &mut rng, None).is_err());
}
