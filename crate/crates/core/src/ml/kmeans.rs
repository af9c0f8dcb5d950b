//! Lloyd's K-means over a [`DistArray`].
//!
//! Every iteration submits one assignment task per row of blocks. Each task
//! sees the full rows of its partition (all column blocks as a collection) and
//! the current centers, and returns per-cluster partial sums, counts and its
//! share of the inertia. A single reduction task merges the partials.

use std::sync::Arc;

use rand::seq::index;
use rand::Rng;

use crate::array::{rng_for, DistArray};
use crate::block::{Block, Matrix};
use crate::error::{arg_err, Error, Result};
use crate::runtime::{payload, Arg};

/// Fitted K-means state.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansModel {
    pub k: usize,
    /// `k x d` cluster centers.
    pub centers: Matrix,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
    /// Iterations actually run.
    pub n_iter: usize,
    /// Inertia of each iteration's assignment step, measured against the
    /// centers that step used.
    pub inertia_history: Vec<f64>,
}

/// K-means configuration.
#[derive(Debug, Clone)]
pub struct KMeans {
    pub k: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
    pub init: Option<Matrix>,
}

impl KMeans {
    pub fn new(k: usize) -> KMeans {
        KMeans { k, max_iter: 300, tol: 1e-4, seed: 0, init: None }
    }

    pub fn max_iter(mut self, max_iter: usize) -> KMeans {
        self.max_iter = max_iter;
        self
    }

    pub fn tol(mut self, tol: f64) -> KMeans {
        self.tol = tol;
        self
    }

    pub fn seed(mut self, seed: u64) -> KMeans {
        self.seed = seed;
        self
    }

    /// Starts from the given `k x d` centers instead of sampled rows.
    pub fn init(mut self, centers: Matrix) -> KMeans {
        self.init = Some(centers);
        self
    }

    pub fn fit(&self, x: &DistArray) -> Result<KMeansModel> {
        let (n, d) = x.shape();
        if x.is_sparse() {
            return Err(Error::Unsupported("k-means needs a dense array".into()));
        }
        if self.k == 0 || self.k > n {
            return arg_err(format!("k = {} must be within 1..={n}", self.k));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return arg_err("tol must be positive");
        }
        let mut centers = match &self.init {
            Some(c) if c.shape() != (self.k, d) => {
                return arg_err(format!("initial centers are {:?}, expected {:?}", c.shape(), (self.k, d)))
            }
            Some(c) => c.clone(),
            None => {
                let picks = index::sample(&mut rng_for(self.seed, &[]), n, self.k);
                let rows = picks.iter().map(|i| x.fetch_row(i)).collect::<Result<Vec<_>>>()?;
                Matrix::from_rows(&rows)?
            }
        };

        let rt = x.runtime();
        let mut inertia_history = Vec::new();
        let mut n_iter = 0;
        while n_iter < self.max_iter {
            n_iter += 1;
            let shared = Arc::new(centers.clone());
            let partials = (0..x.grid_shape().0)
                .map(|i| {
                    rt.submit1(
                        "kmeans_partial",
                        vec![Arg::Collection(x.block_row(i)), Arg::scalar(Arc::clone(&shared))],
                        |a| {
                            let blocks = a.many::<Block>(0)?;
                            let centers = a.one::<Arc<Matrix>>(1)?;
                            Ok(payload(partial_sums(&blocks, centers)?))
                        },
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let k = self.k;
            let merged = rt.submit1("kmeans_reduce", vec![Arg::Collection(partials)], move |a| {
                let mut total = Partial::zeros(k, d);
                for p in a.many::<Partial>(0)? {
                    total.merge(p);
                }
                Ok(payload(total))
            })?;
            let total = rt.fetch_as::<Partial>(&merged)?;
            inertia_history.push(total.inertia);

            let mut next = Matrix::zeros(self.k, d);
            for c in 0..self.k {
                if total.counts[c] == 0 {
                    let mut rng = rng_for(self.seed, &[n_iter as u64, c as u64]);
                    let row = x.fetch_row(rng.gen_range(0..n))?;
                    next.row_mut(c).copy_from_slice(&row);
                } else {
                    let inv = 1.0 / total.counts[c] as f64;
                    for (o, &s) in next.row_mut(c).iter_mut().zip(total.sums.row(c)) {
                        *o = s * inv;
                    }
                }
            }
            let shift = (0..self.k)
                .map(|c| sq_dist(centers.row(c), next.row(c)).sqrt())
                .fold(0.0, f64::max);
            centers = next;
            log::debug!("kmeans iteration {n_iter}: inertia {}, shift {shift}", total.inertia);
            if shift < self.tol {
                break;
            }
        }

        Ok(KMeansModel {
            k: self.k,
            centers,
            max_iter: self.max_iter,
            tol: self.tol,
            seed: self.seed,
            n_iter,
            inertia_history,
        })
    }
}

impl KMeansModel {
    /// Index of the nearest center for every row, as a new `n x 1` array.
    pub fn predict(&self, x: &DistArray) -> Result<DistArray> {
        if x.n_cols() != self.centers.cols() {
            return arg_err(format!(
                "array has {} features, model has {}",
                x.n_cols(),
                self.centers.cols()
            ));
        }
        let rt = x.runtime();
        let centers = Arc::new(self.centers.clone());
        let col = (0..x.grid_shape().0)
            .map(|i| {
                rt.submit1(
                    "kmeans_predict",
                    vec![Arg::Collection(x.block_row(i)), Arg::scalar(Arc::clone(&centers))],
                    |a| {
                        let blocks = a.many::<Block>(0)?;
                        let centers = a.one::<Arc<Matrix>>(1)?;
                        let rows = assemble_rows(&blocks);
                        let labels: Vec<f64> = (0..rows.rows())
                            .map(|r| nearest(rows.row(r), centers).0 as f64)
                            .collect();
                        Ok(payload(Block::Dense(Matrix::new(labels.len(), 1, labels)?)))
                    },
                )
                .map(|h| vec![h])
            })
            .collect::<Result<Vec<_>>>()?;
        DistArray::from_grid(rt, (x.n_rows(), 1), (x.reg_block().0, 1), col, false)
    }
}

/// Fits K-means with sampled initial centers.
pub fn kmeans_fit(x: &DistArray, k: usize, max_iter: usize, tol: f64, seed: u64) -> Result<KMeansModel> {
    KMeans::new(k).max_iter(max_iter).tol(tol).seed(seed).fit(x)
}

pub fn kmeans_predict(model: &KMeansModel, x: &DistArray) -> Result<DistArray> {
    model.predict(x)
}

struct Partial {
    sums: Matrix,
    counts: Vec<u64>,
    inertia: f64,
}

impl Partial {
    fn zeros(k: usize, d: usize) -> Partial {
        Partial { sums: Matrix::zeros(k, d), counts: vec![0; k], inertia: 0.0 }
    }

    fn merge(&mut self, other: &Partial) {
        self.sums.add_assign(&other.sums);
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.inertia += other.inertia;
    }
}

fn assemble_rows(blocks: &[&Block]) -> Matrix {
    let dense: Vec<Matrix> = blocks.iter().map(|b| b.to_dense()).collect();
    let refs: Vec<&Matrix> = dense.iter().collect();
    Matrix::hstack(&refs, refs[0].rows()).expect("blocks of one grid row share a height")
}

fn partial_sums(blocks: &[&Block], centers: &Matrix) -> Result<Partial> {
    let rows = assemble_rows(blocks);
    let mut p = Partial::zeros(centers.rows(), centers.cols());
    for r in 0..rows.rows() {
        let x = rows.row(r);
        let (c, dist) = nearest(x, centers);
        for (s, &v) in p.sums.row_mut(c).iter_mut().zip(x) {
            *s += v;
        }
        p.counts[c] += 1;
        p.inertia += dist;
    }
    Ok(p)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest center and squared distance; ties go to the lowest index.
fn nearest(x: &[f64], centers: &Matrix) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for c in 0..centers.rows() {
        let d = sq_dist(x, centers.row(c));
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}
