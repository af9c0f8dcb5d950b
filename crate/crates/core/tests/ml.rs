mod common;

use common::*;
use dsarray::ml::{Als, KMeans};
use dsarray::{CsrMatrix, DistArray, Matrix, Runtime};
use proptest::prelude::*;

fn non_increasing(xs: &[f64], rel_slack: f64) -> bool {
    xs.windows(2).all(|w| w[1] <= w[0] + rel_slack * w[0].abs())
}

#[test]
fn kmeans_matches_reference_across_layouts() {
    let (n, d, k) = (600, 6, 4);
    let (x, init) = blobs(11, n, d, k);
    let reference = lloyd(&x, &init, 100, 1e-6);
    let init = Matrix::from_rows(&init).unwrap();
    for workers in [1, 8] {
        let rt = Runtime::new(workers);
        for block in [(n, d), (n / 4, d), (n / 4, d / 2), (37, 5)] {
            let a = DistArray::from_dense(&rt, &x, block).unwrap();
            let model = KMeans::new(k).init(init.clone()).max_iter(100).tol(1e-6).fit(&a).unwrap();
            assert_close(
                model.centers.data(),
                &flat(&reference.centers),
                &vec![1.0; k * d],
                1e-9,
                &format!("centers {block:?} x{workers}"),
            );
            assert_eq!(model.inertia_history.len(), reference.inertia.len());
            assert!(non_increasing(&model.inertia_history, 1e-12), "{:?}", model.inertia_history);
        }
    }
}

#[test]
fn kmeans_predict_assigns_nearest() {
    let rt = Runtime::new(4);
    let (x, init) = blobs(5, 200, 3, 3);
    let a = DistArray::from_dense(&rt, &x, (30, 2)).unwrap();
    let model = KMeans::new(3).init(Matrix::from_rows(&init).unwrap()).fit(&a).unwrap();
    let labels = model.predict(&a).unwrap().collect().unwrap();
    assert_eq!(labels.shape(), (200, 1));
    let centers = model.centers.to_rows();
    for (row, &label) in x.iter().zip(labels.data()) {
        let dist = |c: &Vec<f64>| row.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        let best = (0..3).min_by(|&i, &j| dist(&centers[i]).total_cmp(&dist(&centers[j]))).unwrap();
        assert_eq!(label as usize, best);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn kmeans_seeded_init_is_layout_independent(seed in any::<u64>(), p in 5usize..=60, q in 1usize..=4) {
        let (x, _) = blobs(seed, 60, 4, 3);
        let rt = Runtime::new(4);
        let whole = DistArray::from_dense(&rt, &x, (60, 4)).unwrap();
        let split = DistArray::from_dense(&rt, &x, (p, q)).unwrap();
        let km = KMeans::new(3).seed(seed).max_iter(50);
        let a = km.fit(&whole).unwrap();
        let b = km.fit(&split).unwrap();
        prop_assert_eq!(a.n_iter, b.n_iter);
        assert_close(a.centers.data(), b.centers.data(), &[1.0; 12], 1e-9, "centers");
        prop_assert!(non_increasing(&b.inertia_history, 1e-12));
    }
}

fn ratings(rt: &Runtime, seed: u64, n: usize, m: usize, r: usize, block: (usize, usize)) -> (DistArray, Rows) {
    let (triplets, full) = low_rank_ratings(seed, n, m, r, 0.4);
    let csr = CsrMatrix::from_triplets(n, m, &triplets).unwrap();
    (DistArray::from_csr(rt, &csr, block).unwrap(), full)
}

#[test]
fn als_recovers_low_rank_without_transposes() {
    let rt = Runtime::new(8);
    let (r, _) = ratings(&rt, 3, 100, 80, 5, (25, 20));
    rt.barrier().unwrap();
    rt.stats_reset();
    let model = Als::new(5).lambda(1e-3).max_iter(50).tol(1e-9).seed(1).fit(&r).unwrap();
    rt.barrier().unwrap();
    let stats = rt.stats_snapshot();
    assert_eq!(stats.submitted("transpose"), 0);
    let sweeps = model.n_iter as u64;
    assert_eq!(stats.submitted("als_user"), 4 * sweeps);
    assert_eq!(stats.submitted("als_item"), 4 * sweeps);
    let rmse = *model.rmse_history.last().unwrap();
    assert!(rmse < 1e-2, "rmse {rmse} after {} sweeps", model.n_iter);
    assert!(non_increasing(&model.objective_history, 1e-12), "{:?}", model.objective_history);
}

#[test]
fn als_is_layout_and_worker_independent() {
    let fit = |workers, block| {
        let rt = Runtime::new(workers);
        let (r, _) = ratings(&rt, 9, 40, 30, 3, block);
        Als::new(3).lambda(0.05).max_iter(10).seed(4).fit(&r).unwrap()
    };
    let a = fit(1, (40, 30));
    let b = fit(8, (7, 6));
    assert_close(a.user_factors.data(), b.user_factors.data(), &vec![1.0; 120], 1e-9, "users");
    assert_close(a.item_factors.data(), b.item_factors.data(), &vec![1.0; 90], 1e-9, "items");
}

#[test]
fn als_full_readout_matches_factors() {
    let rt = Runtime::new(4);
    let (r, _) = ratings(&rt, 2, 20, 15, 2, (6, 4));
    let model = Als::new(2).max_iter(5).fit(&r).unwrap();
    let full = model.full(&rt, (6, 4)).unwrap().collect().unwrap();
    let want = matmul(&model.user_factors.to_rows(), &transpose(&model.item_factors.to_rows()));
    let scale = flat(&matmul(&abs(&model.user_factors.to_rows()), &transpose(&abs(&model.item_factors.to_rows()))));
    assert_close(full.data(), &flat(&want), &scale, 1e-9, "full");
    assert!((model.predict(3, 7).unwrap() - want[3][7]).abs() <= 1e-12 * scale[3 * 15 + 7].max(1.0));
}
