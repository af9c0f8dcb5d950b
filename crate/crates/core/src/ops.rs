//! Parallel operators over [`DistArray`].
//!
//! Each operator has a fixed task-count contract, observable through
//! [`RuntimeStats`](crate::runtime::RuntimeStats):
//!
//! | operator            | tag         | tasks                       |
//! |---------------------|-------------|-----------------------------|
//! | `transpose`         | `transpose` | grid rows                   |
//! | `shuffle_rows`      | `shuffle`   | 2 x grid rows               |
//! | reduce over rows    | `reduce`    | grid columns                |
//! | reduce over columns | `reduce`    | grid rows                   |
//! | `map` / `zip`       | `map`/`zip` | grid rows x grid columns    |
//! | `matmul`            | `matmul`    | output grid rows x columns  |

use crate::array::DistArray;
use crate::block::{Block, CsrMatrix, Matrix};
use crate::error::{arg_err, Error, Result};
use crate::runtime::{payload, Arg, Handle};
use crate::shuffle;

/// Reduction axis, numbered like NumPy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Collapse rows: one value per column.
    Rows = 0,
    /// Collapse columns: one value per row.
    Cols = 1,
}

impl TryFrom<usize> for Axis {
    type Error = Error;

    fn try_from(v: usize) -> Result<Axis> {
        match v {
            0 => Ok(Axis::Rows),
            1 => Ok(Axis::Cols),
            _ => arg_err(format!("axis must be 0 or 1, got {v}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduction {
    Sum,
    Min,
    Max,
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementwiseFn {
    Power(f64),
    Sqrt,
    Scale(f64),
    AddScalar(f64),
}

impl ElementwiseFn {
    fn apply(self, v: f64) -> f64 {
        match self {
            ElementwiseFn::Power(k) => {
                if k.fract() == 0.0 && k.abs() <= i32::MAX as f64 {
                    v.powi(k as i32)
                } else {
                    v.powf(k)
                }
            }
            ElementwiseFn::Sqrt => v.sqrt(),
            ElementwiseFn::Scale(c) => v * c,
            ElementwiseFn::AddScalar(c) => v + c,
        }
    }

    fn preserves_zero(self) -> bool {
        match self {
            ElementwiseFn::Power(k) => k > 0.0,
            ElementwiseFn::Sqrt | ElementwiseFn::Scale(_) => true,
            ElementwiseFn::AddScalar(c) => c == 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
}

impl BinaryOp {
    fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            BinaryOp::Add => a + b,
            BinaryOp::Sub => a - b,
            BinaryOp::Mul => a * b,
        }
    }
}

impl DistArray {
    /// Transposes each row of blocks in one task and rearranges the grid so
    /// that block `(i, j)` becomes block `(j, i)`.
    pub fn transpose(&self) -> Result<DistArray> {
        let (gr, gc) = self.grid_shape();
        let rt = self.runtime();
        let mut out: Vec<Vec<Handle>> = vec![Vec::with_capacity(gr); gc];
        for i in 0..gr {
            let row = rt.submit("transpose", vec![Arg::Collection(self.block_row(i))], gc, |a| {
                Ok(a.many::<Block>(0)?.into_iter().map(|b| payload(b.transpose())).collect())
            })?;
            for (j, h) in row.into_iter().enumerate() {
                out[j].push(h);
            }
        }
        let (p, q) = self.reg_block();
        self.with_blocks((self.n_cols(), self.n_rows()), (q, p), out, self.is_sparse())
    }

    /// Pseudo-shuffles rows: each row of blocks is split into one random part
    /// per output row of blocks, and each output row of blocks merges one part
    /// from every input row of blocks, then permutes its rows.
    pub fn shuffle_rows(&self, seed: u64) -> Result<DistArray> {
        let (gr, gc) = self.grid_shape();
        let rt = self.runtime();
        let sparse = self.is_sparse();
        let sizes: Vec<usize> = (0..gr).map(|i| self.row_range(i).len()).collect();
        let counts = shuffle::plan_counts(&sizes, &sizes, seed);

        let mut parts: Vec<Vec<Handle>> = Vec::with_capacity(gr);
        for (i, counts_row) in counts.into_iter().enumerate() {
            let n = sizes[i];
            let split = rt.submit("shuffle", vec![Arg::Collection(self.block_row(i))], gr, move |a| {
                let blocks = a.many::<Block>(0)?;
                let order = shuffle::split_order(seed, i, n);
                Ok((0..counts_row.len())
                    .map(|j| {
                        let rows = shuffle::part_rows(&order, &counts_row, j);
                        let part: Vec<Block> = blocks.iter().map(|b| b.select_rows(&rows)).collect();
                        payload(part)
                    })
                    .collect())
            })?;
            parts.push(split);
        }

        let mut out = Vec::with_capacity(gr);
        for j in 0..gr {
            let incoming: Vec<Handle> = parts.iter().map(|p| p[j].clone()).collect();
            let n = sizes[j];
            let col_widths: Vec<usize> = (0..gc).map(|c| self.col_range(c).len()).collect();
            let merged = rt.submit("shuffle", vec![Arg::Collection(incoming)], gc, move |a| {
                let parts = a.many::<Vec<Block>>(0)?;
                let order = shuffle::merge_order(seed, j, n);
                col_widths
                    .iter()
                    .enumerate()
                    .map(|(c, &w)| {
                        let pieces: Vec<&Block> = parts.iter().map(|p| &p[c]).collect();
                        let stacked = Block::vstack(&pieces, w, sparse)?;
                        Ok(payload(stacked.select_rows(&order)))
                    })
                    .collect()
            })?;
            out.push(merged);
        }
        self.with_blocks(self.shape(), self.reg_block(), out, sparse)
    }

    /// Reduces along `axis`; one task per grid column (rows axis) or grid row
    /// (columns axis), each consuming that line of blocks as a collection.
    pub fn reduce(&self, axis: Axis, kind: Reduction) -> Result<DistArray> {
        let (gr, gc) = self.grid_shape();
        let (p, q) = self.reg_block();
        let rt = self.runtime();
        match axis {
            Axis::Rows => {
                let extent = self.n_rows();
                let row = (0..gc)
                    .map(|j| {
                        rt.submit1("reduce", vec![Arg::Collection(self.block_col(j))], move |a| {
                            let blocks = a.many::<Block>(0)?;
                            Ok(payload(Block::Dense(reduce_down(&blocks, kind, extent))))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                self.with_blocks((1, self.n_cols()), (1, q), vec![row], false)
            }
            Axis::Cols => {
                let extent = self.n_cols();
                let col = (0..gr)
                    .map(|i| {
                        rt.submit1("reduce", vec![Arg::Collection(self.block_row(i))], move |a| {
                            let blocks = a.many::<Block>(0)?;
                            Ok(payload(Block::Dense(reduce_across(&blocks, kind, extent))))
                        })
                        .map(|h| vec![h])
                    })
                    .collect::<Result<Vec<_>>>()?;
                self.with_blocks((self.n_rows(), 1), (p, 1), col, false)
            }
        }
    }

    pub fn sum_axis(&self, axis: Axis) -> Result<DistArray> {
        self.reduce(axis, Reduction::Sum)
    }

    pub fn min_axis(&self, axis: Axis) -> Result<DistArray> {
        self.reduce(axis, Reduction::Min)
    }

    pub fn max_axis(&self, axis: Axis) -> Result<DistArray> {
        self.reduce(axis, Reduction::Max)
    }

    /// Sum along `axis` scaled by the reciprocal of the collapsed extent.
    pub fn mean_axis(&self, axis: Axis) -> Result<DistArray> {
        self.reduce(axis, Reduction::Mean)
    }

    /// Applies `f` to every element; one task per block.
    pub fn map(&self, f: ElementwiseFn) -> Result<DistArray> {
        if self.is_sparse() && !f.preserves_zero() {
            return Err(Error::Unsupported(format!("{f:?} would densify a sparse array")));
        }
        let rt = self.runtime();
        let blocks = self
            .blocks()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|h| {
                        rt.submit1("map", vec![h.into()], move |a| {
                            let out = match a.one::<Block>(0)? {
                                Block::Dense(m) => Block::Dense(m.map(|v| f.apply(v))),
                                Block::Sparse(s) => Block::Sparse(s.map_stored(|v| f.apply(v))),
                            };
                            Ok(payload(out))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        self.with_blocks(self.shape(), self.reg_block(), blocks, self.is_sparse())
    }

    pub fn pow(&self, k: f64) -> Result<DistArray> {
        self.map(ElementwiseFn::Power(k))
    }

    pub fn sqrt(&self) -> Result<DistArray> {
        self.map(ElementwiseFn::Sqrt)
    }

    pub fn scale(&self, c: f64) -> Result<DistArray> {
        self.map(ElementwiseFn::Scale(c))
    }

    pub fn add_scalar(&self, c: f64) -> Result<DistArray> {
        self.map(ElementwiseFn::AddScalar(c))
    }

    /// Combines two identically blocked arrays elementwise; one task per block.
    pub fn zip(&self, other: &DistArray, op: BinaryOp) -> Result<DistArray> {
        if self.shape() != other.shape() || self.reg_block() != other.reg_block() {
            return arg_err(format!(
                "zip: {:?} blocked {:?} vs {:?} blocked {:?}",
                self.shape(),
                self.reg_block(),
                other.shape(),
                other.reg_block()
            ));
        }
        if self.is_sparse() != other.is_sparse() {
            return Err(Error::Unsupported("zip of dense and sparse arrays".into()));
        }
        let rt = self.runtime();
        let blocks = self
            .blocks()
            .iter()
            .zip(other.blocks())
            .map(|(ra, rb)| {
                ra.iter()
                    .zip(rb)
                    .map(|(ha, hb)| {
                        rt.submit1("zip", vec![ha.into(), hb.into()], move |a| {
                            let out = match (a.one::<Block>(0)?, a.one::<Block>(1)?) {
                                (Block::Dense(x), Block::Dense(y)) => Block::Dense(Matrix::new(
                                    x.rows(),
                                    x.cols(),
                                    x.data().iter().zip(y.data()).map(|(&u, &v)| op.apply(u, v)).collect(),
                                )?),
                                (Block::Sparse(x), Block::Sparse(y)) => {
                                    Block::Sparse(x.zip_with(y, |u, v| op.apply(u, v)))
                                }
                                _ => return Err(Error::Unsupported("mixed block storage".into())),
                            };
                            Ok(payload(out))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        self.with_blocks(self.shape(), self.reg_block(), blocks, self.is_sparse())
    }

    pub fn add(&self, other: &DistArray) -> Result<DistArray> {
        self.zip(other, BinaryOp::Add)
    }

    pub fn sub(&self, other: &DistArray) -> Result<DistArray> {
        self.zip(other, BinaryOp::Sub)
    }

    pub fn mul(&self, other: &DistArray) -> Result<DistArray> {
        self.zip(other, BinaryOp::Mul)
    }

    /// L2 norm along `axis`, composed as `sqrt(sum(a ** 2))`.
    pub fn norm_axis(&self, axis: Axis) -> Result<DistArray> {
        self.pow(2.0)?.sum_axis(axis)?.sqrt()
    }

    /// Blocked product; one task per output block, consuming row `i` of
    /// `self` and column `j` of `other` as collections.
    pub fn matmul(&self, other: &DistArray) -> Result<DistArray> {
        if self.n_cols() != other.n_rows() {
            return arg_err(format!(
                "matmul: {:?} times {:?}",
                self.shape(),
                other.shape()
            ));
        }
        if self.reg_block().1 != other.reg_block().0 {
            return arg_err(format!(
                "matmul: inner blocking {} vs {}",
                self.reg_block().1,
                other.reg_block().0
            ));
        }
        let sparse = self.is_sparse() && other.is_sparse();
        let (gr, _) = self.grid_shape();
        let (_, gc) = other.grid_shape();
        let rt = self.runtime();
        let blocks = (0..gr)
            .map(|i| {
                (0..gc)
                    .map(|j| {
                        let rows = self.row_range(i).len();
                        let cols = other.col_range(j).len();
                        rt.submit1(
                            "matmul",
                            vec![Arg::Collection(self.block_row(i)), Arg::Collection(other.block_col(j))],
                            move |a| {
                                let lhs = a.many::<Block>(0)?;
                                let rhs = a.many::<Block>(1)?;
                                Ok(payload(block_dot(&lhs, &rhs, rows, cols, sparse)?))
                            },
                        )
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        self.with_blocks(
            (self.n_rows(), other.n_cols()),
            (self.reg_block().0, other.reg_block().1),
            blocks,
            sparse,
        )
    }
}

fn block_dot(lhs: &[&Block], rhs: &[&Block], rows: usize, cols: usize, sparse: bool) -> Result<Block> {
    if sparse {
        let mut acc = CsrMatrix::zeros(rows, cols);
        for (a, b) in lhs.iter().zip(rhs) {
            let prod = a.matmul(b)?;
            acc = acc.zip_with(prod.as_sparse()?, |x, y| x + y);
        }
        Ok(Block::Sparse(acc))
    } else {
        let mut acc = Matrix::zeros(rows, cols);
        for (a, b) in lhs.iter().zip(rhs) {
            acc.add_assign(&a.matmul(b)?.to_dense());
        }
        Ok(Block::Dense(acc))
    }
}

fn init_value(kind: Reduction) -> f64 {
    match kind {
        Reduction::Sum | Reduction::Mean => 0.0,
        Reduction::Min => f64::INFINITY,
        Reduction::Max => f64::NEG_INFINITY,
    }
}

fn fold(kind: Reduction, acc: f64, v: f64) -> f64 {
    match kind {
        Reduction::Sum | Reduction::Mean => acc + v,
        Reduction::Min => acc.min(v),
        Reduction::Max => acc.max(v),
    }
}

fn finish(kind: Reduction, mut acc: Vec<f64>, extent: usize) -> Vec<f64> {
    if kind == Reduction::Mean {
        let s = 1.0 / extent as f64;
        acc.iter_mut().for_each(|v| *v *= s);
    }
    acc
}

/// Collapses a column of blocks (top to bottom) into a `1 x width` row.
fn reduce_down(blocks: &[&Block], kind: Reduction, extent: usize) -> Matrix {
    let width = blocks[0].shape().1;
    let mut acc = vec![init_value(kind); width];
    for b in blocks {
        match b {
            Block::Dense(m) => {
                for i in 0..m.rows() {
                    for (a, &v) in acc.iter_mut().zip(m.row(i)) {
                        *a = fold(kind, *a, v);
                    }
                }
            }
            Block::Sparse(s) => {
                let mut stored = vec![0usize; width];
                for i in 0..s.rows() {
                    let (cs, vs) = s.row(i);
                    for (&c, &v) in cs.iter().zip(vs) {
                        acc[c] = fold(kind, acc[c], v);
                        stored[c] += 1;
                    }
                }
                if matches!(kind, Reduction::Min | Reduction::Max) {
                    for (a, &n) in acc.iter_mut().zip(&stored) {
                        if n < s.rows() {
                            *a = fold(kind, *a, 0.0);
                        }
                    }
                }
            }
        }
    }
    Matrix::new(1, width, finish(kind, acc, extent)).expect("row shape")
}

/// Collapses a row of blocks (left to right) into a `height x 1` column.
fn reduce_across(blocks: &[&Block], kind: Reduction, extent: usize) -> Matrix {
    let height = blocks[0].shape().0;
    let mut acc = vec![init_value(kind); height];
    for b in blocks {
        match b {
            Block::Dense(m) => {
                for (i, a) in acc.iter_mut().enumerate() {
                    for &v in m.row(i) {
                        *a = fold(kind, *a, v);
                    }
                }
            }
            Block::Sparse(s) => {
                for (i, a) in acc.iter_mut().enumerate() {
                    let (cs, vs) = s.row(i);
                    for &v in vs {
                        *a = fold(kind, *a, v);
                    }
                    if cs.len() < s.cols() && matches!(kind, Reduction::Min | Reduction::Max) {
                        *a = fold(kind, *a, 0.0);
                    }
                }
            }
        }
    }
    Matrix::new(height, 1, finish(kind, acc, extent)).expect("column shape")
}
