//! Explicit-feedback alternating least squares over a sparse [`DistArray`].
//!
//! A sweep solves one ridge regression per user, with one task per row of
//! blocks, then one per item, with one task per column of blocks. Item tasks
//! read the ratings column of blocks directly, so no transposed copy of the
//! ratings is ever built. Factor matrices are small; they are collected on
//! the driver after each half-sweep and handed whole to the next tasks.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::array::{rng_for, DistArray};
use crate::block::{Block, Matrix};
use crate::error::{arg_err, Error, Result};
use crate::runtime::{payload, Arg, Handle, Runtime};

/// Fitted factor model.
#[derive(Debug, Clone, PartialEq)]
pub struct AlsModel {
    pub rank: usize,
    /// `n_users x rank`.
    pub user_factors: Matrix,
    /// `n_items x rank`.
    pub item_factors: Matrix,
    pub lambda: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
    pub n_iter: usize,
    /// Observed-entry RMSE after each sweep.
    pub rmse_history: Vec<f64>,
    /// Regularized objective after each sweep.
    pub objective_history: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Als {
    pub rank: usize,
    pub lambda: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Als {
    pub fn new(rank: usize) -> Als {
        Als { rank, lambda: 0.1, max_iter: 50, tol: 1e-6, seed: 0 }
    }

    pub fn lambda(mut self, lambda: f64) -> Als {
        self.lambda = lambda;
        self
    }

    pub fn max_iter(mut self, max_iter: usize) -> Als {
        self.max_iter = max_iter;
        self
    }

    pub fn tol(mut self, tol: f64) -> Als {
        self.tol = tol;
        self
    }

    pub fn seed(mut self, seed: u64) -> Als {
        self.seed = seed;
        self
    }

    /// Factorizes `ratings`; stored entries are the observed ratings.
    pub fn fit(&self, ratings: &DistArray) -> Result<AlsModel> {
        if !ratings.is_sparse() {
            return Err(Error::Unsupported("ALS expects a sparse ratings array".into()));
        }
        if self.rank == 0 {
            return arg_err("rank must be at least 1");
        }
        if self.lambda.is_nan() || self.lambda <= 0.0 {
            return arg_err("lambda must be positive");
        }
        let (n_users, n_items) = ratings.shape();
        let k = self.rank;
        let mut rng = rng_for(self.seed, &[]);
        let mut items = Matrix::from_fn(n_items, k, |_, _| rng.gen::<f64>());
        let mut users = Matrix::zeros(n_users, k);

        let rt = ratings.runtime();
        let mut rmse_history: Vec<f64> = Vec::new();
        let mut objective_history = Vec::new();
        let mut n_iter = 0;
        while n_iter < self.max_iter {
            n_iter += 1;
            users = self.user_step(rt, ratings, &users, &items)?;
            let (next_items, sse, count) = self.item_step(rt, ratings, &users, &items)?;
            items = next_items;

            let rmse = if count > 0 { (sse / count as f64).sqrt() } else { 0.0 };
            let objective = sse + self.lambda * (sq_norm(&users) + sq_norm(&items));
            log::debug!("als sweep {n_iter}: rmse {rmse}, objective {objective}");
            let converged = rmse_history.last().is_some_and(|prev| (prev - rmse).abs() < self.tol);
            rmse_history.push(rmse);
            objective_history.push(objective);
            if converged {
                break;
            }
        }

        Ok(AlsModel {
            rank: k,
            user_factors: users,
            item_factors: items,
            lambda: self.lambda,
            max_iter: self.max_iter,
            tol: self.tol,
            seed: self.seed,
            n_iter,
            rmse_history,
            objective_history,
        })
    }

    fn user_step(&self, rt: &Runtime, ratings: &DistArray, users: &Matrix, items: &Matrix) -> Result<Matrix> {
        let (_, q) = ratings.reg_block();
        let k = self.rank;
        let lambda = self.lambda;
        let items = Arc::new(items.clone());
        let handles = (0..ratings.grid_shape().0)
            .map(|i| {
                let prev = users.submatrix(ratings.row_range(i), 0..k);
                rt.submit1(
                    "als_user",
                    vec![
                        Arg::Collection(ratings.block_row(i)),
                        Arg::scalar(Arc::clone(&items)),
                        Arg::scalar(prev),
                    ],
                    move |a| {
                        let blocks = a.many::<Block>(0)?;
                        let items = a.one::<Arc<Matrix>>(1)?;
                        let prev = a.one::<Matrix>(2)?;
                        let mut out = prev.clone();
                        for r in 0..prev.rows() {
                            let mut eq = NormalEquations::new(k, lambda);
                            for (j, b) in blocks.iter().enumerate() {
                                let (cols, vals) = b.as_sparse()?.row(r);
                                for (&c, &v) in cols.iter().zip(vals) {
                                    eq.observe(items.row(j * q + c), v);
                                }
                            }
                            if eq.n_obs > 0 {
                                out.row_mut(r).copy_from_slice(&eq.solve()?);
                            }
                        }
                        Ok(payload(out))
                    },
                )
            })
            .collect::<Result<Vec<_>>>()?;
        gather_factors(rt, &handles, k)
    }

    fn item_step(
        &self,
        rt: &Runtime,
        ratings: &DistArray,
        users: &Matrix,
        items: &Matrix,
    ) -> Result<(Matrix, f64, u64)> {
        let (p, _) = ratings.reg_block();
        let k = self.rank;
        let lambda = self.lambda;
        let users = Arc::new(users.clone());
        let mut factor_handles = Vec::new();
        let mut error_handles = Vec::new();
        for j in 0..ratings.grid_shape().1 {
            let prev = items.submatrix(ratings.col_range(j), 0..k);
            let out = rt.submit(
                "als_item",
                vec![
                    Arg::Collection(ratings.block_col(j)),
                    Arg::scalar(Arc::clone(&users)),
                    Arg::scalar(prev),
                ],
                2,
                move |a| {
                    let blocks = a.many::<Block>(0)?;
                    let users = a.one::<Arc<Matrix>>(1)?;
                    let prev = a.one::<Matrix>(2)?;
                    let mut eqs: Vec<NormalEquations> =
                        (0..prev.rows()).map(|_| NormalEquations::new(k, lambda)).collect();
                    for (g, b) in blocks.iter().enumerate() {
                        let s = b.as_sparse()?;
                        for r in 0..s.rows() {
                            let (cols, vals) = s.row(r);
                            for (&c, &v) in cols.iter().zip(vals) {
                                eqs[c].observe(users.row(g * p + r), v);
                            }
                        }
                    }
                    let mut out = prev.clone();
                    for (c, eq) in eqs.iter().enumerate() {
                        if eq.n_obs > 0 {
                            out.row_mut(c).copy_from_slice(&eq.solve()?);
                        }
                    }
                    // squared error of this column of blocks under the updated factors
                    let mut sse = 0.0;
                    let mut count = 0u64;
                    for (g, b) in blocks.iter().enumerate() {
                        let s = b.as_sparse()?;
                        for r in 0..s.rows() {
                            let (cols, vals) = s.row(r);
                            for (&c, &v) in cols.iter().zip(vals) {
                                let e = v - dot(users.row(g * p + r), out.row(c));
                                sse += e * e;
                                count += 1;
                            }
                        }
                    }
                    Ok(vec![payload(out), payload((sse, count))])
                },
            )?;
            factor_handles.push(out[0].clone());
            error_handles.push(out[1].clone());
        }
        let items = gather_factors(rt, &factor_handles, k)?;
        let mut sse = 0.0;
        let mut count = 0;
        for h in &error_handles {
            let (s, c) = *rt.fetch_as::<(f64, u64)>(h)?;
            sse += s;
            count += c;
        }
        Ok((items, sse, count))
    }
}

impl AlsModel {
    /// Predicted rating for user `i`, item `j`.
    pub fn predict(&self, i: usize, j: usize) -> Result<f64> {
        if i >= self.user_factors.rows() || j >= self.item_factors.rows() {
            return Err(Error::Index(format!(
                "({i}, {j}) outside {}x{}",
                self.user_factors.rows(),
                self.item_factors.rows()
            )));
        }
        Ok(dot(self.user_factors.row(i), self.item_factors.row(j)))
    }

    /// Materializes `U * V^T` as a distributed product with the given blocking.
    pub fn full(&self, rt: &Runtime, reg_block: (usize, usize)) -> Result<DistArray> {
        let u = DistArray::from_matrix(rt, &self.user_factors, (reg_block.0, self.rank), false)?;
        let vt = DistArray::from_matrix(rt, &self.item_factors.transpose(), (self.rank, reg_block.1), false)?;
        u.matmul(&vt)
    }
}

pub fn als_fit(ratings: &DistArray, rank: usize, lambda: f64, max_iter: usize, tol: f64, seed: u64) -> Result<AlsModel> {
    Als::new(rank).lambda(lambda).max_iter(max_iter).tol(tol).seed(seed).fit(ratings)
}

pub fn als_predict(model: &AlsModel, i: usize, j: usize) -> Result<f64> {
    model.predict(i, j)
}

pub fn als_full(model: &AlsModel, rt: &Runtime, reg_block: (usize, usize)) -> Result<DistArray> {
    model.full(rt, reg_block)
}

/// Accumulates `(sum x x^T + lambda I) w = sum r x` for one factor row.
struct NormalEquations {
    gram: DMatrix<f64>,
    rhs: DVector<f64>,
    n_obs: usize,
}

impl NormalEquations {
    fn new(k: usize, lambda: f64) -> NormalEquations {
        NormalEquations {
            gram: DMatrix::identity(k, k) * lambda,
            rhs: DVector::zeros(k),
            n_obs: 0,
        }
    }

    fn observe(&mut self, x: &[f64], rating: f64) {
        let k = x.len();
        for a in 0..k {
            for b in 0..k {
                self.gram[(a, b)] += x[a] * x[b];
            }
            self.rhs[a] += rating * x[a];
        }
        self.n_obs += 1;
    }

    fn solve(&self) -> Result<Vec<f64>> {
        let chol = self
            .gram
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Argument("normal equations are not positive definite".into()))?;
        Ok(chol.solve(&self.rhs).iter().copied().collect())
    }
}

fn gather_factors(rt: &Runtime, handles: &[Handle], k: usize) -> Result<Matrix> {
    let parts = handles
        .iter()
        .map(|h| rt.fetch_as::<Matrix>(h))
        .collect::<Result<Vec<_>>>()?;
    Matrix::vstack(parts.iter().map(|p| &**p), k)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sq_norm(m: &Matrix) -> f64 {
    m.data().iter().map(|v| v * v).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::CsrMatrix;

    fn rank_one(rt: &Runtime) -> (DistArray, Vec<f64>, Vec<f64>) {
        let mut rng = rng_for(42, &[]);
        let u: Vec<f64> = (0..20).map(|_| rng.gen_range(0.5..1.5)).collect();
        let v: Vec<f64> = (0..15).map(|_| rng.gen_range(0.5..1.5)).collect();
        let mut triplets = Vec::new();
        for (i, ui) in u.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                if rng.gen_bool(0.6) {
                    triplets.push((i, j, ui * vj));
                }
            }
        }
        let r = CsrMatrix::from_triplets(20, 15, &triplets).unwrap();
        (DistArray::from_csr(rt, &r, (6, 4)).unwrap(), u, v)
    }

    #[test]
    fn recovers_rank_one() {
        let rt = Runtime::new(4);
        let (r, _, _) = rank_one(&rt);
        let model = als_fit(&r, 1, 1e-3, 50, 1e-10, 7).unwrap();
        assert!(*model.rmse_history.last().unwrap() < 1e-2, "{:?}", model.rmse_history);
        let dense = r.collect().unwrap();
        for i in 0..20 {
            for j in 0..15 {
                let v = dense.get(i, j);
                if v != 0.0 {
                    assert!((model.predict(i, j).unwrap() - v).abs() < 1e-2);
                }
            }
        }
    }

    #[test]
    fn sweep_task_counts_and_no_transpose() {
        let rt = Runtime::new(4);
        let (r, _, _) = rank_one(&rt);
        rt.stats_reset();
        let model = als_fit(&r, 2, 0.1, 3, 0.0, 1).unwrap();
        rt.barrier().unwrap();
        let s = rt.stats_snapshot();
        let (gr, gc) = r.grid_shape();
        assert_eq!(model.n_iter, 3);
        assert_eq!(s.submitted("als_user") as usize, 3 * gr);
        assert_eq!(s.submitted("als_item") as usize, 3 * gc);
        assert_eq!(s.submitted("transpose"), 0);
    }

    #[test]
    fn huge_lambda_shrinks_factors() {
        let rt = Runtime::new(2);
        let (r, _, _) = rank_one(&rt);
        let model = als_fit(&r, 2, 1e9, 5, 1e-12, 3).unwrap();
        assert!(model.user_factors.data().iter().all(|v| v.abs() < 1e-6));
        let vals = r.collect_sparse().unwrap();
        let rms = (vals.values().iter().map(|v| v * v).sum::<f64>() / vals.nnz() as f64).sqrt();
        assert!((model.rmse_history.last().unwrap() - rms).abs() < 1e-6);
    }

    #[test]
    fn unobserved_rows_keep_their_factors() {
        let rt = Runtime::new(2);
        let r = CsrMatrix::from_triplets(3, 3, &[(0, 0, 1.0), (1, 1, 2.0)]).unwrap();
        let a = DistArray::from_csr(&rt, &r, (2, 2)).unwrap();
        let model = als_fit(&a, 2, 0.1, 4, 0.0, 5).unwrap();
        assert_eq!(model.user_factors.row(2), &[0.0, 0.0]);
        let mut rng = rng_for(5, &[]);
        let init: Vec<f64> = (0..6).map(|_| rng.gen::<f64>()).collect();
        assert_eq!(model.item_factors.row(2), &init[4..6]);
    }

    #[test]
    fn readout() {
        let rt = Runtime::new(2);
        let model = AlsModel {
            rank: 2,
            user_factors: Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 0.0], vec![3.0, -1.0]]).unwrap(),
            item_factors: Matrix::from_rows(&[vec![0.5, 1.0], vec![2.0, 0.0]]).unwrap(),
            lambda: 1.0,
            max_iter: 1,
            tol: 1.0,
            seed: 0,
            n_iter: 0,
            rmse_history: vec![],
            objective_history: vec![],
        };
        assert_eq!(model.predict(0, 0).unwrap(), 2.5);
        assert_eq!(model.predict(1, 1).unwrap(), 0.0);
        assert!(matches!(model.predict(3, 0), Err(Error::Index(_))));
        let full = model.full(&rt, (2, 1)).unwrap().collect().unwrap();
        assert_eq!(full.to_rows(), vec![vec![2.5, 2.0], vec![0.0, 0.0], vec![0.5, 6.0]]);
    }

    #[test]
    fn rejects_dense_and_bad_params() {
        let rt = Runtime::new(1);
        let dense = DistArray::full(&rt, 2, 2, (1, 1), 1.0).unwrap();
        assert!(matches!(als_fit(&dense, 1, 0.1, 1, 0.0, 0), Err(Error::Unsupported(_))));
        let (r, _, _) = rank_one(&rt);
        assert!(matches!(als_fit(&r, 0, 0.1, 1, 0.0, 0), Err(Error::Argument(_))));
        assert!(matches!(als_fit(&r, 1, 0.0, 1, 0.0, 0), Err(Error::Argument(_))));
    }
}
