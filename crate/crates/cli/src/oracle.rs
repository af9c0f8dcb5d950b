//! Single-array reference results computed with plain loops on the driver.

use std::cmp::Ordering;

use dsarray::{CsrMatrix, Matrix};

/// Produces expected values. A corrupted oracle perturbs every result so that
/// checks against it must fail.
#[derive(Debug, Clone, Copy)]
pub struct Oracle {
    pub corrupt: bool,
}

impl Oracle {
    fn tamper(&self, values: &mut [f64]) {
        if self.corrupt {
            if let Some(v) = values.first_mut() {
                *v += 1.0;
            }
        }
    }

    pub fn transpose(&self, m: &Matrix) -> Vec<f64> {
        let mut out = Vec::with_capacity(m.rows() * m.cols());
        for j in 0..m.cols() {
            for i in 0..m.rows() {
                out.push(m.get(i, j));
            }
        }
        self.tamper(&mut out);
        out
    }

    /// Column sums and the sums of absolute values that bound their error.
    pub fn column_sums(&self, m: &Matrix) -> (Vec<f64>, Vec<f64>) {
        let mut sums = vec![0.0; m.cols()];
        let mut scale = vec![0.0; m.cols()];
        for i in 0..m.rows() {
            for (j, &v) in m.row(i).iter().enumerate() {
                sums[j] += v;
                scale[j] += v.abs();
            }
        }
        self.tamper(&mut sums);
        (sums, scale)
    }

    /// Row-major product and the product of absolute values.
    pub fn matmul(&self, a: &Matrix, b: &Matrix) -> (Vec<f64>, Vec<f64>) {
        let (n, k, m) = (a.rows(), a.cols(), b.cols());
        let mut out = vec![0.0; n * m];
        let mut scale = vec![0.0; n * m];
        for i in 0..n {
            for j in 0..m {
                for l in 0..k {
                    out[i * m + j] += a.get(i, l) * b.get(l, j);
                    scale[i * m + j] += (a.get(i, l) * b.get(l, j)).abs();
                }
            }
        }
        self.tamper(&mut out);
        (out, scale)
    }

    /// Rows in lexicographic order.
    pub fn sorted_rows(&self, m: &Matrix) -> Vec<f64> {
        let mut out = sort_rows(m);
        self.tamper(&mut out);
        out
    }

    pub fn rows(&self, m: &Matrix, range: std::ops::Range<usize>) -> Vec<f64> {
        let mut out: Vec<f64> = range.flat_map(|i| m.row(i).to_vec()).collect();
        self.tamper(&mut out);
        out
    }

    /// Lloyd iterations from `init`. `None` when a cluster empties, since the
    /// reseeding rule is not reproduced here.
    pub fn lloyd(&self, x: &Matrix, init: &Matrix, max_iter: usize, tol: f64) -> Option<Matrix> {
        let (k, d) = init.shape();
        let mut centers = init.clone();
        for _ in 0..max_iter {
            let mut sums = vec![0.0; k * d];
            let mut counts = vec![0usize; k];
            for i in 0..x.rows() {
                let row = x.row(i);
                let mut best = (f64::INFINITY, 0);
                for c in 0..k {
                    let dist: f64 = row.iter().zip(centers.row(c)).map(|(a, b)| (a - b) * (a - b)).sum();
                    if dist < best.0 {
                        best = (dist, c);
                    }
                }
                counts[best.1] += 1;
                for (s, v) in sums[best.1 * d..(best.1 + 1) * d].iter_mut().zip(row) {
                    *s += v;
                }
            }
            if counts.contains(&0) {
                return None;
            }
            let next = Matrix::from_fn(k, d, |c, j| sums[c * d + j] / counts[c] as f64);
            let shift = (0..k)
                .map(|c| next.row(c).iter().zip(centers.row(c)).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
                .fold(0.0, f64::max);
            centers = next;
            if shift < tol {
                break;
            }
        }
        let mut data = centers.into_data();
        self.tamper(&mut data);
        Matrix::new(k, d, data).ok()
    }

    /// RMSE of `users · itemsᵀ` over the stored entries of `ratings`.
    pub fn observed_rmse(&self, ratings: &CsrMatrix, users: &Matrix, items: &Matrix) -> f64 {
        let mut sse = 0.0;
        for i in 0..ratings.rows() {
            let (cols, vals) = ratings.row(i);
            for (&j, &r) in cols.iter().zip(vals) {
                let pred: f64 = users.row(i).iter().zip(items.row(j)).map(|(a, b)| a * b).sum();
                sse += (r - pred) * (r - pred);
            }
        }
        let mut rmse = [(sse / ratings.nnz().max(1) as f64).sqrt()];
        self.tamper(&mut rmse);
        rmse[0]
    }
}

pub fn sort_rows(m: &Matrix) -> Vec<f64> {
    let mut rows = m.to_rows();
    rows.sort_by(|a, b| {
        a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
    });
    rows.concat()
}

pub fn bits_equal(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

/// `|got - want| <= tol * scale` elementwise.
pub fn within(got: &[f64], want: &[f64], scale: &[f64], tol: f64) -> bool {
    got.len() == want.len()
        && got.iter().zip(want).zip(scale).all(|((g, w), s)| (g - w).abs() <= tol * s.max(1e-300))
}
