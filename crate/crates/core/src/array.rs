//! The distributed array: a total shape cut into a grid of blocks, each
//! referenced by a runtime handle.
//!
//! Every block has the regular block shape `(P, Q)` except those in the last
//! grid row (which may have fewer rows) and the last grid column (which may
//! have fewer columns).

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::block::{Block, CsrMatrix, Matrix};
use crate::error::{arg_err, Error, Result};
use crate::runtime::{payload, Arg, Handle, Runtime};

/// Number of grid cells needed to cover `extent` with cells of size `block`.
pub fn grid_len(extent: usize, block: usize) -> usize {
    extent.div_ceil(block)
}

/// Element range covered by grid cell `i`.
pub fn cell_range(i: usize, extent: usize, block: usize) -> Range<usize> {
    let start = i * block;
    start..(start + block).min(extent)
}

/// Derives a stream seed from a base seed and a position (splitmix64 mixing).
pub(crate) fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    parts.iter().fold(mix(seed), |acc, &p| mix(acc ^ mix(p)))
}

pub(crate) fn rng_for(seed: u64, parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, parts))
}

/// A 2D array partitioned into a grid of blocks produced by tasks.
#[derive(Clone, Debug)]
pub struct DistArray {
    rt: Runtime,
    n_rows: usize,
    n_cols: usize,
    reg_block: (usize, usize),
    blocks: Vec<Vec<Handle>>,
    sparse: bool,
}

fn check_shape(n_rows: usize, n_cols: usize, reg_block: (usize, usize)) -> Result<()> {
    let (p, q) = reg_block;
    if n_rows == 0 || n_cols == 0 {
        return arg_err(format!("array shape {n_rows}x{n_cols} has a zero dimension"));
    }
    if p == 0 || q == 0 || p > n_rows || q > n_cols {
        return arg_err(format!(
            "block shape {p}x{q} must be within 1x1..={n_rows}x{n_cols}"
        ));
    }
    Ok(())
}

impl DistArray {
    /// Assembles an array from an existing grid of handles.
    pub fn from_grid(
        rt: &Runtime,
        shape: (usize, usize),
        reg_block: (usize, usize),
        blocks: Vec<Vec<Handle>>,
        sparse: bool,
    ) -> Result<DistArray> {
        check_shape(shape.0, shape.1, reg_block)?;
        let gr = grid_len(shape.0, reg_block.0);
        let gc = grid_len(shape.1, reg_block.1);
        if blocks.len() != gr || blocks.iter().any(|r| r.len() != gc) {
            return arg_err(format!("grid must be {gr}x{gc}"));
        }
        Ok(DistArray {
            rt: rt.clone(),
            n_rows: shape.0,
            n_cols: shape.1,
            reg_block,
            blocks,
            sparse,
        })
    }

    /// Uniform `[0, 1)` values; one task per block, each seeded from `(seed, i, j)`.
    pub fn random(
        rt: &Runtime,
        n_rows: usize,
        n_cols: usize,
        reg_block: (usize, usize),
        seed: u64,
    ) -> Result<DistArray> {
        check_shape(n_rows, n_cols, reg_block)?;
        Self::generate(rt, "random", n_rows, n_cols, reg_block, move |i, j, r, c| {
            let mut rng = rng_for(seed, &[i as u64, j as u64]);
            Matrix::from_fn(r, c, |_, _| rng.gen::<f64>())
        })
    }

    /// Constant-valued array; one task per block.
    pub fn full(
        rt: &Runtime,
        n_rows: usize,
        n_cols: usize,
        reg_block: (usize, usize),
        value: f64,
    ) -> Result<DistArray> {
        check_shape(n_rows, n_cols, reg_block)?;
        Self::generate(rt, "full", n_rows, n_cols, reg_block, move |_, _, r, c| {
            Matrix::filled(r, c, value)
        })
    }

    pub fn zeros(rt: &Runtime, n_rows: usize, n_cols: usize, reg_block: (usize, usize)) -> Result<DistArray> {
        Self::full(rt, n_rows, n_cols, reg_block, 0.0)
    }

    /// `n x n` identity; one task per block.
    pub fn identity(rt: &Runtime, n: usize, reg_block: (usize, usize)) -> Result<DistArray> {
        check_shape(n, n, reg_block)?;
        let (p, q) = reg_block;
        Self::generate(rt, "identity", n, n, reg_block, move |i, j, r, c| {
            Matrix::from_fn(r, c, |a, b| if i * p + a == j * q + b { 1.0 } else { 0.0 })
        })
    }

    fn generate<F>(
        rt: &Runtime,
        tag: &str,
        n_rows: usize,
        n_cols: usize,
        reg_block: (usize, usize),
        make: F,
    ) -> Result<DistArray>
    where
        F: Fn(usize, usize, usize, usize) -> Matrix + Send + Sync + Clone + 'static,
    {
        let (p, q) = reg_block;
        let blocks = (0..grid_len(n_rows, p))
            .map(|i| {
                (0..grid_len(n_cols, q))
                    .map(|j| {
                        let r = cell_range(i, n_rows, p).len();
                        let c = cell_range(j, n_cols, q).len();
                        let make = make.clone();
                        rt.submit1(tag, vec![], move |_| Ok(payload(Block::Dense(make(i, j, r, c)))))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_grid(rt, (n_rows, n_cols), reg_block, blocks, false)
    }

    /// Partitions in-memory rows into dense blocks registered as ready data.
    pub fn from_dense(rt: &Runtime, values: &[Vec<f64>], reg_block: (usize, usize)) -> Result<DistArray> {
        Self::from_matrix(rt, &Matrix::from_rows(values)?, reg_block, false)
    }

    /// Like [`DistArray::from_dense`] but stores blocks in compressed-row form.
    pub fn from_dense_sparse(rt: &Runtime, values: &[Vec<f64>], reg_block: (usize, usize)) -> Result<DistArray> {
        Self::from_matrix(rt, &Matrix::from_rows(values)?, reg_block, true)
    }

    pub fn from_matrix(rt: &Runtime, m: &Matrix, reg_block: (usize, usize), sparse: bool) -> Result<DistArray> {
        check_shape(m.rows(), m.cols(), reg_block)?;
        let (p, q) = reg_block;
        let blocks = (0..grid_len(m.rows(), p))
            .map(|i| {
                (0..grid_len(m.cols(), q))
                    .map(|j| {
                        let sub = m.submatrix(cell_range(i, m.rows(), p), cell_range(j, m.cols(), q));
                        let block = if sparse {
                            Block::Sparse(CsrMatrix::from_dense(&sub))
                        } else {
                            Block::Dense(sub)
                        };
                        rt.put_value(block)
                    })
                    .collect()
            })
            .collect();
        Self::from_grid(rt, m.shape(), reg_block, blocks, sparse)
    }

    pub fn from_csr(rt: &Runtime, m: &CsrMatrix, reg_block: (usize, usize)) -> Result<DistArray> {
        check_shape(m.rows(), m.cols(), reg_block)?;
        let (p, q) = reg_block;
        let blocks = (0..grid_len(m.rows(), p))
            .map(|i| {
                (0..grid_len(m.cols(), q))
                    .map(|j| {
                        let sub = m.submatrix(cell_range(i, m.rows(), p), cell_range(j, m.cols(), q));
                        rt.put_value(Block::Sparse(sub))
                    })
                    .collect()
            })
            .collect();
        Self::from_grid(rt, m.shape(), reg_block, blocks, true)
    }

    pub fn runtime(&self) -> &Runtime {
        &self.rt
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_rows, self.n_cols)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn reg_block(&self) -> (usize, usize) {
        self.reg_block
    }

    pub fn is_sparse(&self) -> bool {
        self.sparse
    }

    /// `(grid_rows, grid_cols)`.
    pub fn grid_shape(&self) -> (usize, usize) {
        (self.blocks.len(), self.blocks[0].len())
    }

    pub fn blocks(&self) -> &[Vec<Handle>] {
        &self.blocks
    }

    pub fn block(&self, i: usize, j: usize) -> &Handle {
        &self.blocks[i][j]
    }

    /// Handles of grid row `i`.
    pub fn block_row(&self, i: usize) -> Vec<Handle> {
        self.blocks[i].clone()
    }

    /// Handles of grid column `j`.
    pub fn block_col(&self, j: usize) -> Vec<Handle> {
        self.blocks.iter().map(|r| r[j].clone()).collect()
    }

    pub fn row_range(&self, i: usize) -> Range<usize> {
        cell_range(i, self.n_rows, self.reg_block.0)
    }

    pub fn col_range(&self, j: usize) -> Range<usize> {
        cell_range(j, self.n_cols, self.reg_block.1)
    }

    /// Expected shape of block `(i, j)` under the blocking rule.
    pub fn block_shape(&self, i: usize, j: usize) -> (usize, usize) {
        (self.row_range(i).len(), self.col_range(j).len())
    }

    pub(crate) fn with_blocks(
        &self,
        shape: (usize, usize),
        reg_block: (usize, usize),
        blocks: Vec<Vec<Handle>>,
        sparse: bool,
    ) -> Result<DistArray> {
        Self::from_grid(&self.rt, shape, reg_block, blocks, sparse)
    }

    pub fn fetch_block(&self, i: usize, j: usize) -> Result<std::sync::Arc<Block>> {
        self.rt.fetch_as::<Block>(&self.blocks[i][j])
    }

    /// Fetches every block and stitches them into one dense matrix.
    pub fn collect(&self) -> Result<Matrix> {
        let mut out = Matrix::zeros(self.n_rows, self.n_cols);
        for (i, row) in self.blocks.iter().enumerate() {
            let r0 = self.row_range(i).start;
            for (j, h) in row.iter().enumerate() {
                let c0 = self.col_range(j).start;
                let block = self.rt.fetch_as::<Block>(h)?;
                let dense = block.to_dense();
                for a in 0..dense.rows() {
                    out.row_mut(r0 + a)[c0..c0 + dense.cols()].copy_from_slice(dense.row(a));
                }
            }
        }
        Ok(out)
    }

    /// Fetches every block and stitches them into one compressed-row matrix.
    pub fn collect_sparse(&self) -> Result<CsrMatrix> {
        let mut rows = Vec::with_capacity(self.blocks.len());
        for row in &self.blocks {
            let fetched = row
                .iter()
                .map(|h| self.rt.fetch_as::<Block>(h))
                .collect::<Result<Vec<_>>>()?;
            let sparse: Vec<CsrMatrix> = fetched
                .iter()
                .map(|b| match &**b {
                    Block::Sparse(s) => s.clone(),
                    Block::Dense(d) => CsrMatrix::from_dense(d),
                })
                .collect();
            let refs: Vec<&CsrMatrix> = sparse.iter().collect();
            rows.push(CsrMatrix::hstack(&refs, refs[0].rows())?);
        }
        CsrMatrix::vstack(&rows, self.n_cols)
    }

    /// Verifies that every fetched block has the shape and storage the blocking rule demands.
    pub fn check_blocks(&self) -> Result<()> {
        for i in 0..self.blocks.len() {
            for j in 0..self.blocks[i].len() {
                let b = self.fetch_block(i, j)?;
                if b.shape() != self.block_shape(i, j) {
                    return arg_err(format!(
                        "block ({i}, {j}) has shape {:?}, expected {:?}",
                        b.shape(),
                        self.block_shape(i, j)
                    ));
                }
                if b.is_sparse() != self.sparse {
                    return arg_err(format!("block ({i}, {j}) has the wrong storage kind"));
                }
            }
        }
        Ok(())
    }

    /// Synchronized read of a single element.
    pub fn element(&self, i: usize, j: usize) -> Result<f64> {
        if i >= self.n_rows || j >= self.n_cols {
            return Err(Error::Index(format!(
                "({i}, {j}) outside {}x{}",
                self.n_rows, self.n_cols
            )));
        }
        let (p, q) = self.reg_block;
        Ok(self.fetch_block(i / p, j / q)?.get(i % p, j % q))
    }

    /// Synchronized read of one full row.
    pub fn fetch_row(&self, i: usize) -> Result<Vec<f64>> {
        if i >= self.n_rows {
            return Err(Error::Index(format!("row {i} outside {} rows", self.n_rows)));
        }
        let (p, _) = self.reg_block;
        let mut row = Vec::with_capacity(self.n_cols);
        for j in 0..self.blocks[0].len() {
            let b = self.fetch_block(i / p, j)?;
            row.extend((0..b.shape().1).map(|c| b.get(i % p, c)));
        }
        Ok(row)
    }

    /// Rows `[start, stop)`, re-blocked on the same regular block shape.
    pub fn slice_rows(&self, start: usize, stop: usize) -> Result<DistArray> {
        check_range(start, stop, self.n_rows, "row")?;
        let rows: Vec<usize> = (start..stop).collect();
        self.select_rows_tagged(&rows, "slice")
    }

    /// Rows at the given indices, in order (duplicates allowed).
    pub fn gather_rows(&self, rows: &[usize]) -> Result<DistArray> {
        if rows.is_empty() {
            return arg_err("empty row index list");
        }
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.n_rows) {
            return Err(Error::Index(format!("row {bad} outside {} rows", self.n_rows)));
        }
        self.select_rows_tagged(rows, "gather")
    }

    /// Columns `[start, stop)`, re-blocked on the same regular block shape.
    pub fn slice_cols(&self, start: usize, stop: usize) -> Result<DistArray> {
        check_range(start, stop, self.n_cols, "column")?;
        let (p, q) = self.reg_block;
        let len = stop - start;
        let q_out = q.min(len);
        let sparse = self.sparse;
        let mut out = vec![Vec::new(); self.blocks.len()];
        for (i, out_row) in out.iter_mut().enumerate() {
            let n_rows = self.row_range(i).len();
            for jo in 0..grid_len(len, q_out) {
                let wanted = cell_range(jo, len, q_out);
                let (lo, hi) = (start + wanted.start, start + wanted.end);
                let sources: Vec<usize> = (lo / q..=(hi - 1) / q).collect();
                let pieces: Vec<Range<usize>> = sources
                    .iter()
                    .map(|&g| {
                        let r = cell_range(g, self.n_cols, q);
                        (lo.max(r.start) - r.start)..(hi.min(r.end) - r.start)
                    })
                    .collect();
                let handles = sources.iter().map(|&g| self.blocks[i][g].clone()).collect();
                let h = self.rt.submit1("slice", vec![Arg::Collection(handles)], move |a| {
                    let blocks = a.many::<Block>(0)?;
                    let parts: Vec<Block> = blocks
                        .iter()
                        .zip(&pieces)
                        .map(|(b, cols)| b.submatrix(0..n_rows, cols.clone()))
                        .collect();
                    let refs: Vec<&Block> = parts.iter().collect();
                    Ok(payload(Block::hstack(&refs, n_rows, sparse)?))
                })?;
                out_row.push(h);
            }
        }
        self.with_blocks((self.n_rows, len), (p, q_out), out, sparse)
    }

    fn select_rows_tagged(&self, rows: &[usize], tag: &str) -> Result<DistArray> {
        let (p, q) = self.reg_block;
        let len = rows.len();
        let p_out = p.min(len);
        let sparse = self.sparse;
        let gc = self.blocks[0].len();
        let mut out = Vec::new();
        for io in 0..grid_len(len, p_out) {
            let wanted = &rows[cell_range(io, len, p_out)];
            // Source grid rows in first-touch order, plus (source slot, local row) per output row.
            let mut sources: Vec<usize> = Vec::new();
            let mut picks: Vec<(usize, usize)> = Vec::with_capacity(wanted.len());
            for &r in wanted {
                let g = r / p;
                let slot = match sources.iter().position(|&s| s == g) {
                    Some(s) => s,
                    None => {
                        sources.push(g);
                        sources.len() - 1
                    }
                };
                picks.push((slot, r % p));
            }
            let mut out_row = Vec::with_capacity(gc);
            for j in 0..gc {
                let n_cols = self.col_range(j).len();
                let handles = sources.iter().map(|&g| self.blocks[g][j].clone()).collect();
                let picks = picks.clone();
                let h = self.rt.submit1(tag, vec![Arg::Collection(handles)], move |a| {
                    let blocks = a.many::<Block>(0)?;
                    let parts: Vec<Block> = picks
                        .iter()
                        .map(|&(slot, local)| blocks[slot].select_rows(&[local]))
                        .collect();
                    let refs: Vec<&Block> = parts.iter().collect();
                    Ok(payload(Block::vstack(&refs, n_cols, sparse)?))
                })?;
                out_row.push(h);
            }
            out.push(out_row);
        }
        self.with_blocks((len, self.n_cols), (p_out, q), out, sparse)
    }
}

fn check_range(start: usize, stop: usize, extent: usize, what: &str) -> Result<()> {
    if start >= stop {
        return arg_err(format!("empty {what} range {start}..{stop}"));
    }
    if stop > extent {
        return Err(Error::Index(format!("{what} range {start}..{stop} exceeds {extent}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rt() -> Runtime {
        Runtime::new(4)
    }

    fn counting(rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(rows, cols, |i, j| (i * cols + j) as f64)
    }

    #[test]
    fn grid_arithmetic() {
        assert_eq!(grid_len(5, 2), 3);
        assert_eq!(grid_len(4, 2), 2);
        assert_eq!(cell_range(2, 5, 2), 4..5);
    }

    #[test]
    fn random_is_deterministic_and_counted() {
        let rt = rt();
        rt.stats_reset();
        let a = DistArray::random(&rt, 4, 4, (2, 2), 9).unwrap();
        let b = DistArray::random(&rt, 4, 4, (2, 2), 9).unwrap();
        rt.barrier().unwrap();
        assert_eq!(rt.stats_snapshot().submitted("random"), 8);
        let ca = a.collect().unwrap();
        assert_eq!(ca, b.collect().unwrap());
        assert!(ca.data().iter().all(|&v| (0.0..1.0).contains(&v)));
        let c = DistArray::random(&rt, 4, 4, (2, 2), 10).unwrap();
        assert_ne!(ca, c.collect().unwrap());
    }

    #[test]
    fn ragged_edge_blocks() {
        let rt = rt();
        let a = DistArray::random(&rt, 5, 3, (2, 2), 1).unwrap();
        assert_eq!(a.grid_shape(), (3, 2));
        assert_eq!(a.fetch_block(2, 0).unwrap().shape(), (1, 2));
        assert_eq!(a.fetch_block(0, 1).unwrap().shape(), (2, 1));
        assert_eq!(a.fetch_block(2, 1).unwrap().shape(), (1, 1));
        a.check_blocks().unwrap();
    }

    #[test]
    fn single_block() {
        let rt = rt();
        rt.stats_reset();
        let a = DistArray::random(&rt, 1, 1, (1, 1), 3).unwrap();
        assert_eq!(a.grid_shape(), (1, 1));
        assert_eq!(a.collect().unwrap(), a.fetch_block(0, 0).unwrap().to_dense());
        assert_eq!(rt.stats_snapshot().submitted("random"), 1);
    }

    #[test]
    fn creation_errors() {
        let rt = rt();
        assert!(matches!(DistArray::random(&rt, 0, 3, (1, 1), 0), Err(Error::Argument(_))));
        assert!(matches!(DistArray::random(&rt, 3, 3, (4, 1), 0), Err(Error::Argument(_))));
        assert!(matches!(DistArray::from_dense(&rt, &[], (1, 1)), Err(Error::Argument(_))));
        assert!(matches!(
            DistArray::from_dense(&rt, &[vec![1.0, 2.0], vec![3.0]], (1, 1)),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn from_dense_roundtrip() {
        let rt = rt();
        for (r, c, b) in [(5, 7, (2, 3)), (4, 4, (2, 2)), (3, 8, (3, 5))] {
            let m = counting(r, c);
            let a = DistArray::from_dense(&rt, &m.to_rows(), b).unwrap();
            assert_eq!(a.collect().unwrap(), m);
            a.check_blocks().unwrap();
        }
    }

    #[test]
    fn sparse_variant_matches_dense() {
        let rt = rt();
        let mut rng = rng_for(5, &[]);
        let m = Matrix::from_fn(6, 5, |_, _| if rng.gen_bool(0.4) { rng.gen::<f64>() } else { 0.0 });
        let d = DistArray::from_dense(&rt, &m.to_rows(), (4, 2)).unwrap();
        let s = DistArray::from_dense_sparse(&rt, &m.to_rows(), (4, 2)).unwrap();
        assert!(s.is_sparse());
        s.check_blocks().unwrap();
        assert_eq!(s.collect().unwrap(), d.collect().unwrap());
        assert_eq!(s.collect_sparse().unwrap(), CsrMatrix::from_dense(&m));
    }

    #[test]
    fn slicing() {
        let rt = rt();
        let m = counting(200, 50);
        let a = DistArray::from_matrix(&rt, &m, (32, 16), false).unwrap();
        let s = a.slice_rows(10, 100).unwrap();
        assert_eq!(s.shape(), (90, 50));
        assert_eq!(s.reg_block(), (32, 16));
        s.check_blocks().unwrap();
        assert_eq!(s.collect().unwrap(), m.submatrix(10..100, 0..50));
        assert_eq!(a.slice_rows(0, 200).unwrap().collect().unwrap(), m);

        let c = a.slice_cols(7, 40).unwrap();
        c.check_blocks().unwrap();
        assert_eq!(c.collect().unwrap(), m.submatrix(0..200, 7..40));

        let narrow = a.slice_cols(3, 5).unwrap();
        assert_eq!(narrow.reg_block(), (32, 2));
        assert_eq!(narrow.collect().unwrap(), m.submatrix(0..200, 3..5));
    }

    #[test]
    fn slice_touches_only_overlapping_blocks() {
        let rt = rt();
        let a = DistArray::from_matrix(&rt, &counting(12, 4), (4, 2), false).unwrap();
        rt.stats_reset();
        // rows 4..6 lie inside grid row 1; one output block row of 2 columns
        let s = a.slice_rows(4, 6).unwrap();
        rt.barrier().unwrap();
        assert_eq!(rt.stats_snapshot().submitted("slice"), 2);
        assert_eq!(s.collect().unwrap(), counting(12, 4).submatrix(4..6, 0..4));
    }

    #[test]
    fn slice_errors() {
        let rt = rt();
        let a = DistArray::from_matrix(&rt, &counting(6, 6), (2, 2), false).unwrap();
        assert!(matches!(a.slice_rows(3, 3), Err(Error::Argument(_))));
        assert!(matches!(a.slice_rows(4, 2), Err(Error::Argument(_))));
        assert!(matches!(a.slice_rows(0, 7), Err(Error::Index(_))));
        assert!(matches!(a.slice_cols(5, 9), Err(Error::Index(_))));
        assert!(matches!(a.element(6, 0), Err(Error::Index(_))));
        assert!(matches!(a.gather_rows(&[0, 6]), Err(Error::Index(_))));
        assert!(matches!(a.gather_rows(&[]), Err(Error::Argument(_))));
    }

    #[test]
    fn identity_and_elements() {
        let rt = rt();
        let eye = DistArray::identity(&rt, 5, (2, 3)).unwrap();
        for i in 0..5 {
            assert_eq!(eye.element(i, i).unwrap(), 1.0);
        }
        assert_eq!(eye.element(1, 2).unwrap(), 0.0);
        assert_eq!(eye.collect().unwrap(), Matrix::identity(5));
    }

    #[test]
    fn gather_and_sparse_slices() {
        let rt = rt();
        let m = counting(9, 5);
        let a = DistArray::from_matrix(&rt, &m, (2, 2), true).unwrap();
        let g = a.gather_rows(&[8, 0, 3, 3, 5]).unwrap();
        assert!(g.is_sparse());
        g.check_blocks().unwrap();
        assert_eq!(g.collect().unwrap(), m.select_rows(&[8, 0, 3, 3, 5]));
        let c = a.slice_cols(1, 4).unwrap();
        c.check_blocks().unwrap();
        assert_eq!(c.collect().unwrap(), m.submatrix(0..9, 1..4));
        assert_eq!(a.fetch_row(7).unwrap(), m.row(7).to_vec());
    }
}
