//! Naive in-memory reference implementations on `Vec<Vec<f64>>`.
//!
//! These deliberately share no code with the library: every routine is the
//! textbook loop, so agreement with the blocked implementation is evidence of
//! correctness rather than of a shared bug.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rows = Vec<Vec<f64>>;

pub fn random_rows(rng: &mut impl Rng, n: usize, m: usize) -> Rows {
    (0..n).map(|_| (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect()
}

/// Small integers, so every accumulation is exact in `f64`.
pub fn integer_rows(rng: &mut impl Rng, n: usize, m: usize) -> Rows {
    (0..n).map(|_| (0..m).map(|_| rng.gen_range(-9..=9) as f64).collect()).collect()
}

/// Roughly `density` of the entries are nonzero.
pub fn sparse_rows(rng: &mut impl Rng, n: usize, m: usize, density: f64) -> Rows {
    (0..n)
        .map(|_| {
            (0..m)
                .map(|_| if rng.gen_bool(density) { rng.gen_range(-1.0..1.0) } else { 0.0 })
                .collect()
        })
        .collect()
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn transpose(a: &Rows) -> Rows {
    let m = a.first().map_or(0, Vec::len);
    (0..m).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

pub fn matmul(a: &Rows, b: &Rows) -> Rows {
    let m = b[0].len();
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| {
                    let mut s = 0.0;
                    for (k, &x) in row.iter().enumerate() {
                        s += x * b[k][j];
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn abs(a: &Rows) -> Rows {
    a.iter().map(|r| r.iter().map(|v| v.abs()).collect()).collect()
}

pub fn column_sums(a: &Rows) -> Vec<f64> {
    let mut out = vec![0.0; a[0].len()];
    for r in a {
        for (o, v) in out.iter_mut().zip(r) {
            *o += v;
        }
    }
    out
}

pub fn row_sums(a: &Rows) -> Vec<f64> {
    a.iter().map(|r| r.iter().sum()).collect()
}

pub fn column_fold(a: &Rows, f: fn(f64, f64) -> f64) -> Vec<f64> {
    (0..a[0].len()).map(|j| a.iter().skip(1).fold(a[0][j], |acc, r| f(acc, r[j]))).collect()
}

pub fn row_fold(a: &Rows, f: fn(f64, f64) -> f64) -> Vec<f64> {
    a.iter().map(|r| r[1..].iter().fold(r[0], |acc, &v| f(acc, v))).collect()
}

pub fn column_norms(a: &Rows) -> Vec<f64> {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt()).collect()
}

pub fn elementwise(a: &Rows, f: impl Fn(f64) -> f64) -> Rows {
    a.iter().map(|r| r.iter().map(|&v| f(v)).collect()).collect()
}

pub fn zip(a: &Rows, b: &Rows, f: impl Fn(f64, f64) -> f64) -> Rows {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(&p, &q)| f(p, q)).collect()).collect()
}

pub fn sorted_rows(a: &Rows) -> Rows {
    let mut out = a.clone();
    out.sort_by(|x, y| {
        x.iter().zip(y).map(|(p, q)| p.total_cmp(q)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    out
}

/// Elementwise `|got - want| <= tol * scale`, where `scale` bounds the
/// magnitude of the terms that produced `want` (at least 1e-300).
pub fn assert_close(got: &[f64], want: &[f64], scale: &[f64], tol: f64, what: &str) {
    assert_eq!(got.len(), want.len(), "{what}: length");
    for (i, ((g, w), s)) in got.iter().zip(want).zip(scale).enumerate() {
        let err = (g - w).abs();
        assert!(err <= tol * s.max(1e-300), "{what}[{i}]: got {g}, want {w}, err {err} > {tol} * {s}");
    }
}

pub fn close(got: &[f64], want: &[f64], scale: &[f64], tol: f64) -> bool {
    got.len() == want.len()
        && got.iter().zip(want).zip(scale).all(|((g, w), s)| (g - w).abs() <= tol * s.max(1e-300))
}

pub fn flat(a: &Rows) -> Vec<f64> {
    a.iter().flatten().copied().collect()
}

/// Bitwise equality, so `-0.0 != 0.0` and NaNs must match exactly.
pub fn bits_equal(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

/// Plain Lloyd iterations with lowest-index tie breaking. Stops when no
/// center moves by `tol` or more. Data must not produce empty clusters.
pub struct LloydResult {
    pub centers: Rows,
    pub inertia: Vec<f64>,
}

pub fn lloyd(x: &Rows, init: &Rows, max_iter: usize, tol: f64) -> LloydResult {
    let k = init.len();
    let d = x[0].len();
    let mut centers = init.clone();
    let mut inertia = Vec::new();
    for _ in 0..max_iter {
        let mut sums = vec![vec![0.0; d]; k];
        let mut counts = vec![0usize; k];
        let mut total = 0.0;
        for row in x {
            let mut best = (f64::INFINITY, 0);
            for (c, center) in centers.iter().enumerate() {
                let dist: f64 = row.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                if dist < best.0 {
                    best = (dist, c);
                }
            }
            total += best.0;
            counts[best.1] += 1;
            for (s, v) in sums[best.1].iter_mut().zip(row) {
                *s += v;
            }
        }
        inertia.push(total);
        assert!(counts.iter().all(|&c| c > 0), "reference data produced an empty cluster");
        let next: Rows = sums
            .iter()
            .zip(&counts)
            .map(|(s, &c)| s.iter().map(|v| v / c as f64).collect())
            .collect();
        let shift = centers
            .iter()
            .zip(&next)
            .map(|(a, b)| a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        centers = next;
        if shift < tol {
            break;
        }
    }
    LloydResult { centers, inertia }
}

/// `k` well separated Gaussian-ish blobs of `n` points in `d` dimensions, and
/// one point from each blob as a starting center.
pub fn blobs(seed: u64, n: usize, d: usize, k: usize) -> (Rows, Rows) {
    let mut rng = seeded(seed);
    let means: Rows = (0..k).map(|_| (0..d).map(|_| rng.gen_range(-20.0..20.0)).collect()).collect();
    let x: Rows = (0..n)
        .map(|i| {
            let m = &means[i % k];
            m.iter().map(|c| c + rng.gen_range(-1.0..1.0) + rng.gen_range(-1.0..1.0)).collect()
        })
        .collect();
    let init = (0..k).map(|c| x[c].clone()).collect();
    (x, init)
}

/// Rank-`r` ratings `U Vᵀ` with about `density` of the entries observed, as
/// `(row, col, value)` triplets plus the full ground-truth matrix.
pub fn low_rank_ratings(seed: u64, n: usize, m: usize, r: usize, density: f64) -> (Vec<(usize, usize, f64)>, Rows) {
    let mut rng = seeded(seed);
    let u = (0..n).map(|_| (0..r).map(|_| rng.gen_range(0.0..1.0)).collect()).collect::<Rows>();
    let v = (0..m).map(|_| (0..r).map(|_| rng.gen_range(0.0..1.0)).collect()).collect::<Rows>();
    let full = matmul(&u, &transpose(&v));
    let mut triplets = Vec::new();
    for (i, row) in full.iter().enumerate() {
        for (j, &val) in row.iter().enumerate() {
            if rng.gen_bool(density) {
                triplets.push((i, j, val));
            }
        }
    }
    (triplets, full)
}
