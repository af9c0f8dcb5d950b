use anyhow::Result;
use clap::ValueEnum;
use dsarray::baseline::{shuffle_task_count, transpose_task_count};
use dsarray::ml::{Als, KMeans};
use dsarray::{io, Axis, DistArray, Runtime, SubsetDataset};

use crate::bench::synthetic_ratings;
use crate::oracle::{bits_equal, sort_rows, within, Oracle};

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Ops,
    Ml,
}

pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Layouts exercised by the operator checks: `(rows, cols, block_rows, block_cols)`.
const LAYOUTS: [(usize, usize, usize, usize); 5] = [(1, 1, 1, 1), (7, 5, 3, 2), (16, 16, 4, 4), (30, 11, 30, 11), (23, 31, 5, 7)];

pub fn run(suite: Suite, workers: usize, oracle: Oracle) -> Vec<CheckResult> {
    let mut checks: Vec<(String, Box<dyn Fn() -> Check>)> = Vec::new();
    if matches!(suite, Suite::All | Suite::Ops) {
        for (k, &(n, m, p, q)) in LAYOUTS.iter().enumerate() {
            let seed = 100 + k as u64;
            let tag = format!("{n}x{m}/{p}x{q}");
            checks.push((format!("transpose {tag}"), Box::new(move || transpose(workers, oracle, n, m, (p, q), seed))));
            checks.push((format!("shuffle {tag}"), Box::new(move || shuffle(workers, oracle, n, m, (p, q), seed))));
            checks.push((format!("sum {tag}"), Box::new(move || sum(workers, oracle, n, m, (p, q), seed))));
            checks.push((format!("slice {tag}"), Box::new(move || slice(workers, oracle, n, m, (p, q), seed))));
            checks.push((format!("matmul {tag}"), Box::new(move || matmul(workers, oracle, n, m, (p, q), seed))));
            checks.push((format!("load/save {tag}"), Box::new(move || roundtrip(workers, n, m, (p, q), seed))));
        }
        checks.push(("dataset task counts".into(), Box::new(move || dataset_counts(workers, oracle))));
    }
    if matches!(suite, Suite::All | Suite::Ml) {
        checks.push(("kmeans 400x6".into(), Box::new(move || kmeans(workers, oracle))));
        checks.push(("als 60x40".into(), Box::new(move || als(workers, oracle))));
    }
    checks
        .into_iter()
        .map(|(name, check)| {
            let (passed, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
            CheckResult { name, passed, detail }
        })
        .collect()
}

type Check = Result<(bool, String)>;

fn input(rt: &Runtime, n: usize, m: usize, block: (usize, usize), seed: u64) -> Result<DistArray> {
    Ok(DistArray::random(rt, n, m, block, seed)?)
}

fn count(rt: &Runtime, tag: &str) -> Result<u64> {
    rt.barrier()?;
    Ok(rt.stats_snapshot().submitted(tag))
}

fn transpose(workers: usize, oracle: Oracle, n: usize, m: usize, block: (usize, usize), seed: u64) -> Check {
    let rt = Runtime::new(workers);
    let a = input(&rt, n, m, block, seed)?;
    rt.barrier()?;
    rt.stats_reset();
    let t = a.transpose()?;
    let tasks = count(&rt, "transpose")?;
    let want_tasks = a.grid_shape().0 as u64;
    let ok = tasks == want_tasks && bits_equal(t.collect()?.data(), &oracle.transpose(&a.collect()?));
    Ok((ok, format!("{tasks} tasks (want {want_tasks}), exact comparison")))
}

fn shuffle(workers: usize, oracle: Oracle, n: usize, m: usize, block: (usize, usize), seed: u64) -> Check {
    let rt = Runtime::new(workers);
    let a = input(&rt, n, m, block, seed)?;
    rt.barrier()?;
    rt.stats_reset();
    let s = a.shuffle_rows(seed)?;
    let tasks = count(&rt, "shuffle")?;
    let want_tasks = 2 * a.grid_shape().0 as u64;
    let ok = tasks == want_tasks && bits_equal(&sort_rows(&s.collect()?), &oracle.sorted_rows(&a.collect()?));
    Ok((ok, format!("{tasks} tasks (want {want_tasks}), multiset preserved")))
}

fn sum(workers: usize, oracle: Oracle, n: usize, m: usize, block: (usize, usize), seed: u64) -> Check {
    let rt = Runtime::new(workers);
    let a = input(&rt, n, m, block, seed)?;
    let (want, scale) = oracle.column_sums(&a.collect()?);
    let got = a.sum_axis(Axis::Rows)?.collect()?;
    Ok((within(got.data(), &want, &scale, TOL), "column sums, tol 1e-9".into()))
}

fn slice(workers: usize, oracle: Oracle, n: usize, m: usize, block: (usize, usize), seed: u64) -> Check {
    let rt = Runtime::new(workers);
    let a = input(&rt, n, m, block, seed)?;
    let (lo, hi) = (n / 3, n - n / 4);
    let got = a.slice_rows(lo, hi)?.collect()?;
    Ok((bits_equal(got.data(), &oracle.rows(&a.collect()?, lo..hi)), format!("rows {lo}..{hi}, exact comparison")))
}

fn matmul(workers: usize, oracle: Oracle, n: usize, m: usize, block: (usize, usize), seed: u64) -> Check {
    let rt = Runtime::new(workers);
    let a = input(&rt, n, m, block, seed)?;
    let t = a.transpose()?;
    let (want, scale) = oracle.matmul(&a.collect()?, &t.collect()?);
    let got = a.matmul(&t)?.collect()?;
    Ok((within(got.data(), &want, &scale, TOL), "A*At, tol 1e-9".into()))
}

fn roundtrip(workers: usize, n: usize, m: usize, block: (usize, usize), seed: u64) -> Check {
    let rt = Runtime::new(workers);
    let a = input(&rt, n, m, block, seed)?;
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("roundtrip.csv");
    io::save_dense_text(&a, &path)?;
    rt.stats_reset();
    let back = io::load_dense_text(&rt, &path, block)?;
    let tasks = count(&rt, "load")?;
    let ok = tasks == a.grid_shape().0 as u64 && bits_equal(back.collect()?.data(), a.collect()?.data());
    Ok((ok, format!("{tasks} load tasks, exact comparison")))
}

fn dataset_counts(workers: usize, oracle: Oracle) -> Check {
    for (n, s) in [(1, 1), (3, 2), (4, 4), (2, 5), (8, 3)] {
        let rt = Runtime::new(workers);
        let a = input(&rt, n * s, 3, (s, 3), (n * s) as u64)?;
        let x = a.collect()?;
        let ds = SubsetDataset::from_matrix(&rt, &x, None, s)?;
        rt.barrier()?;
        rt.stats_reset();
        let t = ds.transpose()?;
        let tt = count(&rt, "dataset_transpose")?;
        rt.stats_reset();
        let sh = ds.shuffle(1)?;
        let st = count(&rt, "dataset_shuffle")?;
        if tt != transpose_task_count(n) as u64 || st != shuffle_task_count(n, s) as u64 {
            return Ok((false, format!("N={n} S={s}: {tt} transpose, {st} shuffle tasks")));
        }
        if !bits_equal(t.collect_samples()?.data(), &oracle.transpose(&x))
            || !bits_equal(&sort_rows(&sh.collect_samples()?), &oracle.sorted_rows(&x))
        {
            return Ok((false, format!("N={n} S={s}: values differ")));
        }
    }
    Ok((true, "N^2+N and N*min(N,S)+N".into()))
}

fn kmeans(workers: usize, oracle: Oracle) -> Check {
    let rt = Runtime::new(workers);
    // Two well separated groups of points keep every cluster populated.
    let x = DistArray::random(&rt, 400, 6, (50, 3), 5)?.collect()?;
    let x = dsarray::Matrix::from_fn(400, 6, |i, j| x.get(i, j) + if i % 2 == 0 { 10.0 } else { 0.0 });
    let init = x.select_rows(&[0, 1, 2, 3]);
    let a = DistArray::from_matrix(&rt, &x, (50, 3), false)?;
    let model = KMeans::new(4).init(init.clone()).max_iter(50).tol(1e-8).fit(&a)?;
    let monotone = model.inertia_history.windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0]);
    match oracle.lloyd(&x, &init, 50, 1e-8) {
        Some(want) => {
            let dev = max_deviation(model.centers.data(), want.data());
            let ok = monotone && within(model.centers.data(), want.data(), &[1.0; 24], TOL);
            Ok((ok, format!("{} iterations, max center deviation {dev:.1e}, inertia monotone: {monotone}", model.n_iter)))
        }
        None => Ok((false, "oracle produced an empty cluster".into())),
    }
}

fn als(workers: usize, oracle: Oracle) -> Check {
    let rt = Runtime::new(workers);
    let ratings = synthetic_ratings(60, 40, 8);
    let r = DistArray::from_csr(&rt, &ratings, (15, 10))?;
    rt.barrier()?;
    rt.stats_reset();
    let model = Als::new(5).lambda(1e-3).max_iter(50).tol(1e-9).seed(2).fit(&r)?;
    let transposes = count(&rt, "transpose")?;
    let rmse = *model.rmse_history.last().unwrap_or(&f64::NAN);
    let want = oracle.observed_rmse(&ratings, &model.user_factors, &model.item_factors);
    let monotone = model.objective_history.windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0]);
    let ok = transposes == 0 && monotone && rmse < 1e-2 && (rmse - want).abs() <= TOL * want.max(1.0);
    Ok((ok, format!("{} sweeps, rmse {rmse:.2e} (oracle {want:.2e}), {transposes} transposes", model.n_iter)))
}

fn max_deviation(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
