use std::time::Instant;

use anyhow::{bail, Result};
use clap::ValueEnum;
use dsarray::ml::{Als, KMeans};
use dsarray::{Axis, CsrMatrix, DistArray, Matrix, Runtime, SubsetDataset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::oracle::{bits_equal, within, Oracle};
use crate::report::{BenchReport, TaskStats, Timing, Verification};

/// Inputs larger than this many elements are not checked against the oracle.
const ORACLE_LIMIT: usize = 4_000_000;
const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Operation {
    Transpose,
    Shuffle,
    Sum,
    Matmul,
    Kmeans,
    Als,
}

impl Operation {
    fn name(self) -> &'static str {
        match self {
            Operation::Transpose => "transpose",
            Operation::Shuffle => "shuffle",
            Operation::Sum => "sum",
            Operation::Matmul => "matmul",
            Operation::Kmeans => "kmeans",
            Operation::Als => "als",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub op: Operation,
    pub rows: usize,
    pub cols: usize,
    pub block: (usize, usize),
    pub workers: usize,
    pub seed: u64,
    pub baseline: bool,
}

/// The operation's result, kept until the timed section ends.
enum Outcome {
    Array(DistArray),
    Dataset(SubsetDataset),
    Verified(Verification),
}

pub fn run(cfg: &BenchConfig) -> Result<BenchReport> {
    let (n, m) = (cfg.rows, cfg.cols);
    let (p, q) = cfg.block;
    if n == 0 || m == 0 || p == 0 || q == 0 || p > n || q > m {
        bail!("block {p}x{q} must be within 1x1..={n}x{m}");
    }
    if cfg.baseline && !matches!(cfg.op, Operation::Transpose | Operation::Shuffle) {
        bail!("--baseline is available for transpose and shuffle only");
    }
    let rt = Runtime::new(cfg.workers);
    let oracle = Oracle { corrupt: false };
    let feasible = n * m <= ORACLE_LIMIT;

    let (outcome, input, stats, elapsed) = match cfg.op {
        Operation::Transpose | Operation::Shuffle | Operation::Sum => {
            let a = DistArray::random(&rt, n, m, cfg.block, cfg.seed)?;
            let input = a.collect()?;
            let ds = if cfg.baseline { Some(SubsetDataset::from_matrix(&rt, &input, None, p)?) } else { None };
            rt.barrier()?;
            rt.stats_reset();
            let start = Instant::now();
            let outcome = match (cfg.op, ds) {
                (Operation::Transpose, Some(ds)) => Outcome::Dataset(ds.transpose()?),
                (Operation::Shuffle, Some(ds)) => Outcome::Dataset(ds.shuffle(cfg.seed)?),
                (Operation::Transpose, None) => Outcome::Array(a.transpose()?),
                (Operation::Shuffle, None) => Outcome::Array(a.shuffle_rows(cfg.seed)?),
                _ => Outcome::Array(a.sum_axis(Axis::Rows)?),
            };
            rt.barrier()?;
            (outcome, Some(input), rt.stats_snapshot(), start.elapsed())
        }
        Operation::Matmul => {
            let a = DistArray::random(&rt, n, m, cfg.block, cfg.seed)?;
            let b = DistArray::random(&rt, m, m, (q, q), cfg.seed.wrapping_add(1))?;
            rt.barrier()?;
            rt.stats_reset();
            let start = Instant::now();
            let c = a.matmul(&b)?;
            rt.barrier()?;
            let (stats, elapsed) = (rt.stats_snapshot(), start.elapsed());
            let verification = if feasible && n * m * m <= 50 * ORACLE_LIMIT {
                let (want, scale) = oracle.matmul(&a.collect()?, &b.collect()?);
                Verification::check(within(c.collect()?.data(), &want, &scale, TOL), "product vs oracle, tol 1e-9")
            } else {
                Verification::skipped("input too large for the oracle")
            };
            (Outcome::Verified(verification), None, stats, elapsed)
        }
        Operation::Kmeans => {
            let a = DistArray::random(&rt, n, m, cfg.block, cfg.seed)?;
            let k = n.min(8);
            let init = a.slice_rows(0, k)?.collect()?;
            rt.barrier()?;
            rt.stats_reset();
            let start = Instant::now();
            let (max_iter, tol) = (20, 1e-6);
            let model = KMeans::new(k).init(init.clone()).max_iter(max_iter).tol(tol).fit(&a)?;
            rt.barrier()?;
            let (stats, elapsed) = (rt.stats_snapshot(), start.elapsed());
            let verification = if !feasible {
                Verification::skipped("input too large for the oracle")
            } else {
                match oracle.lloyd(&a.collect()?, &init, max_iter, tol) {
                    Some(want) => Verification::check(
                        within(model.centers.data(), want.data(), &vec![1.0; want.data().len()], TOL),
                        format!("{} iterations, centers vs oracle, tol 1e-9", model.n_iter),
                    ),
                    None => Verification::skipped("a cluster emptied; oracle does not reseed"),
                }
            };
            (Outcome::Verified(verification), None, stats, elapsed)
        }
        Operation::Als => {
            let ratings = synthetic_ratings(n, m, cfg.seed);
            let r = DistArray::from_csr(&rt, &ratings, cfg.block)?;
            rt.barrier()?;
            rt.stats_reset();
            let start = Instant::now();
            let model = Als::new(5.min(n).min(m)).lambda(1e-2).max_iter(20).seed(cfg.seed).fit(&r)?;
            rt.barrier()?;
            let (stats, elapsed) = (rt.stats_snapshot(), start.elapsed());
            let rmse = *model.rmse_history.last().expect("at least one sweep");
            let want = oracle.observed_rmse(&ratings, &model.user_factors, &model.item_factors);
            let monotone = model.objective_history.windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0].abs());
            let ok = stats.submitted("transpose") == 0 && monotone && (rmse - want).abs() <= TOL * want.max(1.0);
            let detail = format!("{} sweeps, rmse {rmse:.3e}, {} transposes, objective monotone: {monotone}", model.n_iter, stats.submitted("transpose"));
            (Outcome::Verified(Verification::check(ok, detail)), None, stats, elapsed)
        }
    };

    let verification = match (outcome, input) {
        (Outcome::Verified(v), _) => v,
        (_, None) => unreachable!("structural operations keep their input"),
        (_, Some(_)) if !feasible => Verification::skipped("input too large for the oracle"),
        (Outcome::Array(out), Some(input)) => verify_array(cfg.op, &oracle, &input, &out.collect()?),
        (Outcome::Dataset(out), Some(input)) => verify_array(cfg.op, &oracle, &input, &out.collect_samples()?),
    };

    Ok(BenchReport {
        schema_version: crate::report::SCHEMA_VERSION,
        operation: cfg.op.name().to_string(),
        structure: if cfg.baseline { "dataset" } else { "ds-array" }.to_string(),
        shape: [n, m],
        block: [p, q],
        workers: cfg.workers,
        seed: cfg.seed,
        tasks: TaskStats::from(&stats),
        verification,
        timing: Timing {
            wall_time_ms: elapsed.as_secs_f64() * 1e3,
            max_graph_width: stats.max_graph_width,
        },
    })
}

fn verify_array(op: Operation, oracle: &Oracle, input: &Matrix, got: &Matrix) -> Verification {
    match op {
        Operation::Transpose => {
            Verification::check(bits_equal(got.data(), &oracle.transpose(input)), "transpose vs oracle, exact")
        }
        Operation::Shuffle => Verification::check(
            bits_equal(&crate::oracle::sort_rows(got), &oracle.sorted_rows(input)),
            "sorted rows vs oracle, exact",
        ),
        _ => {
            let (want, scale) = oracle.column_sums(input);
            Verification::check(within(got.data(), &want, &scale, TOL), "column sums vs oracle, tol 1e-9")
        }
    }
}

/// Rank-5 (or smaller) ratings with 40% of the entries observed.
pub fn synthetic_ratings(n: usize, m: usize, seed: u64) -> CsrMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = 5.min(n).min(m);
    let u = Matrix::from_fn(n, r, |_, _| rng.gen::<f64>());
    let v = Matrix::from_fn(m, r, |_, _| rng.gen::<f64>());
    let mut triplets = Vec::new();
    for i in 0..n {
        for j in 0..m {
            if rng.gen_bool(0.4) {
                let value = u.row(i).iter().zip(v.row(j)).map(|(a, b)| a * b).sum();
                triplets.push((i, j, value));
            }
        }
    }
    CsrMatrix::from_triplets(n, m, &triplets).expect("indices within shape")
}
