//! Block storage: dense row-major and compressed sparse row.

use std::ops::Range;

use crate::error::{arg_err, Error, Result};

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Matrix> {
        if data.len() != rows * cols {
            return arg_err(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            ));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Matrix {
        Matrix { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from row vectors; all rows must have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
        let Some(first) = rows.first() else {
            return arg_err("no rows");
        };
        let cols = first.len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return arg_err(format!("row {i} has {} values, expected {cols}", r.len()));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    pub fn submatrix(&self, rows: Range<usize>, cols: Range<usize>) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for i in rows.clone() {
            data.extend_from_slice(&self.row(i)[cols.clone()]);
        }
        Matrix { rows: rows.len(), cols: cols.len(), data }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix { rows: idx.len(), cols: self.cols, data }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn vstack<'a>(parts: impl IntoIterator<Item = &'a Matrix>, cols: usize) -> Result<Matrix> {
        let mut data = Vec::new();
        let mut rows = 0;
        for p in parts {
            if p.cols != cols {
                return arg_err(format!("vstack: {} columns, expected {cols}", p.cols));
            }
            rows += p.rows;
            data.extend_from_slice(&p.data);
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Places matrices with equal row counts side by side.
    pub fn hstack(parts: &[&Matrix], rows: usize) -> Result<Matrix> {
        if let Some(p) = parts.iter().find(|p| p.rows != rows) {
            return arg_err(format!("hstack: {} rows, expected {rows}", p.rows));
        }
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for p in parts {
                data.extend_from_slice(p.row(i));
            }
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return arg_err(format!(
                "matmul: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Adds `other` into `self` elementwise.
    pub fn add_assign(&mut self, other: &Matrix) {
        debug_assert_eq!(self.shape(), other.shape());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }
}

/// Compressed sparse row matrix. Column indices within a row are sorted and unique.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        indptr: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<CsrMatrix> {
        if indptr.len() != rows + 1 || indptr[0] != 0 {
            return arg_err("row offsets must have rows + 1 entries starting at 0");
        }
        if indptr.windows(2).any(|w| w[0] > w[1]) {
            return arg_err("row offsets must be non-decreasing");
        }
        let nnz = indptr[rows];
        if indices.len() != nnz || values.len() != nnz {
            return arg_err("nonzero count does not match row offsets");
        }
        for r in 0..rows {
            let cs = &indices[indptr[r]..indptr[r + 1]];
            if cs.iter().any(|&c| c >= cols) {
                return arg_err(format!("column index out of range in row {r}"));
            }
            if cs.windows(2).any(|w| w[0] >= w[1]) {
                return arg_err(format!("column indices not strictly increasing in row {r}"));
            }
        }
        Ok(CsrMatrix { rows, cols, indptr, indices, values })
    }

    pub fn zeros(rows: usize, cols: usize) -> CsrMatrix {
        CsrMatrix { rows, cols, indptr: vec![0; rows + 1], indices: vec![], values: vec![] }
    }

    /// Builds from (row, col, value) triplets; a repeated coordinate keeps the last value.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Result<CsrMatrix> {
        let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); rows];
        for &(r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::Index(format!("({r}, {c}) outside {rows}x{cols}")));
            }
            per_row[r].push((c, v));
        }
        let mut b = CsrBuilder::new(cols);
        for mut entries in per_row {
            // stable sort keeps insertion order among duplicates; last one wins
            entries.sort_by_key(|e| e.0);
            let mut deduped: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
            for (c, v) in entries {
                match deduped.last_mut() {
                    Some(last) if last.0 == c => last.1 = v,
                    _ => deduped.push((c, v)),
                }
            }
            for (c, v) in deduped {
                b.push(c, v);
            }
            b.end_row();
        }
        Ok(b.finish())
    }

    /// Stores every nonzero of a dense matrix.
    pub fn from_dense(m: &Matrix) -> CsrMatrix {
        let mut b = CsrBuilder::new(m.cols);
        for i in 0..m.rows {
            for (j, &v) in m.row(i).iter().enumerate() {
                if v != 0.0 {
                    b.push(j, v);
                }
            }
            b.end_row();
        }
        b.finish()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.indptr[i]..self.indptr[i + 1];
        (&self.indices[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cs, vs) = self.row(i);
        cs.binary_search(&j).map(|k| vs[k]).unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            let (cs, vs) = self.row(i);
            for (&c, &v) in cs.iter().zip(vs) {
                m.set(i, c, v);
            }
        }
        m
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut counts = vec![0usize; self.cols + 1];
        for &c in &self.indices {
            counts[c + 1] += 1;
        }
        for j in 0..self.cols {
            counts[j + 1] += counts[j];
        }
        let indptr = counts.clone();
        let mut next = counts;
        let mut indices = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.rows {
            let (cs, vs) = self.row(i);
            for (&c, &v) in cs.iter().zip(vs) {
                let slot = next[c];
                indices[slot] = i;
                values[slot] = v;
                next[c] += 1;
            }
        }
        CsrMatrix { rows: self.cols, cols: self.rows, indptr, indices, values }
    }

    pub fn submatrix(&self, rows: Range<usize>, cols: Range<usize>) -> CsrMatrix {
        let mut b = CsrBuilder::new(cols.len());
        for i in rows {
            let (cs, vs) = self.row(i);
            for (&c, &v) in cs.iter().zip(vs) {
                if cols.contains(&c) {
                    b.push(c - cols.start, v);
                }
            }
            b.end_row();
        }
        b.finish()
    }

    pub fn select_rows(&self, idx: &[usize]) -> CsrMatrix {
        let mut b = CsrBuilder::new(self.cols);
        for &i in idx {
            let (cs, vs) = self.row(i);
            for (&c, &v) in cs.iter().zip(vs) {
                b.push(c, v);
            }
            b.end_row();
        }
        b.finish()
    }

    pub fn vstack<'a>(parts: impl IntoIterator<Item = &'a CsrMatrix>, cols: usize) -> Result<CsrMatrix> {
        let mut b = CsrBuilder::new(cols);
        for p in parts {
            if p.cols != cols {
                return arg_err(format!("vstack: {} columns, expected {cols}", p.cols));
            }
            for i in 0..p.rows {
                let (cs, vs) = p.row(i);
                for (&c, &v) in cs.iter().zip(vs) {
                    b.push(c, v);
                }
                b.end_row();
            }
        }
        Ok(b.finish())
    }

    pub fn hstack(parts: &[&CsrMatrix], rows: usize) -> Result<CsrMatrix> {
        if let Some(p) = parts.iter().find(|p| p.rows != rows) {
            return arg_err(format!("hstack: {} rows, expected {rows}", p.rows));
        }
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut b = CsrBuilder::new(cols);
        for i in 0..rows {
            let mut offset = 0;
            for p in parts {
                let (cs, vs) = p.row(i);
                for (&c, &v) in cs.iter().zip(vs) {
                    b.push(offset + c, v);
                }
                offset += p.cols;
            }
            b.end_row();
        }
        Ok(b.finish())
    }

    /// Applies `f` to stored values only; callers guarantee `f(0) == 0`.
    pub fn map_stored(&self, f: impl Fn(f64) -> f64) -> CsrMatrix {
        CsrMatrix { values: self.values.iter().map(|&v| f(v)).collect(), ..self.clone() }
    }

    /// Elementwise combination over the union of stored positions.
    /// `f` must map (0, 0) to 0.
    pub fn zip_with(&self, other: &CsrMatrix, f: impl Fn(f64, f64) -> f64) -> CsrMatrix {
        let mut b = CsrBuilder::new(self.cols);
        for i in 0..self.rows {
            let (ca, va) = self.row(i);
            let (cb, vb) = other.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ca.len() || q < cb.len() {
                let (c, x, y) = match (ca.get(p), cb.get(q)) {
                    (Some(&a), Some(&b)) if a == b => {
                        p += 1;
                        q += 1;
                        (a, va[p - 1], vb[q - 1])
                    }
                    (Some(&a), Some(&b)) if a < b => {
                        p += 1;
                        (a, va[p - 1], 0.0)
                    }
                    (Some(&a), None) => {
                        p += 1;
                        (a, va[p - 1], 0.0)
                    }
                    (_, Some(&b)) => {
                        q += 1;
                        (b, 0.0, vb[q - 1])
                    }
                    (None, None) => unreachable!(),
                };
                b.push(c, f(x, y));
            }
            b.end_row();
        }
        b.finish()
    }

    /// Sparse times sparse (row-by-row accumulation).
    pub fn matmul_sparse(&self, other: &CsrMatrix) -> CsrMatrix {
        let mut acc = vec![0.0; other.cols];
        let mut touched = vec![false; other.cols];
        let mut cols_used: Vec<usize> = Vec::new();
        let mut b = CsrBuilder::new(other.cols);
        for i in 0..self.rows {
            let (ca, va) = self.row(i);
            for (&k, &a) in ca.iter().zip(va) {
                let (cb, vb) = other.row(k);
                for (&j, &bv) in cb.iter().zip(vb) {
                    if !touched[j] {
                        touched[j] = true;
                        cols_used.push(j);
                    }
                    acc[j] += a * bv;
                }
            }
            cols_used.sort_unstable();
            for &j in &cols_used {
                b.push(j, acc[j]);
                acc[j] = 0.0;
                touched[j] = false;
            }
            cols_used.clear();
            b.end_row();
        }
        b.finish()
    }

    pub fn matmul_dense(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows, other.cols());
        for i in 0..self.rows {
            let (ca, va) = self.row(i);
            let out_row = out.row_mut(i);
            for (&k, &a) in ca.iter().zip(va) {
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

/// Dense times sparse.
pub fn dense_matmul_sparse(a: &Matrix, b: &CsrMatrix) -> Matrix {
    let mut out = Matrix::zeros(a.rows(), b.cols());
    for i in 0..a.rows() {
        for k in 0..a.cols() {
            let av = a.get(i, k);
            if av == 0.0 {
                continue;
            }
            let (cs, vs) = b.row(k);
            let out_row = out.row_mut(i);
            for (&j, &bv) in cs.iter().zip(vs) {
                out_row[j] += av * bv;
            }
        }
    }
    out
}

/// Incremental row-by-row CSR construction.
pub(crate) struct CsrBuilder {
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrBuilder {
    pub(crate) fn new(cols: usize) -> CsrBuilder {
        CsrBuilder { cols, indptr: vec![0], indices: vec![], values: vec![] }
    }

    pub(crate) fn push(&mut self, col: usize, value: f64) {
        self.indices.push(col);
        self.values.push(value);
    }

    pub(crate) fn end_row(&mut self) {
        self.indptr.push(self.indices.len());
    }

    pub(crate) fn finish(self) -> CsrMatrix {
        CsrMatrix {
            rows: self.indptr.len() - 1,
            cols: self.cols,
            indptr: self.indptr,
            indices: self.indices,
            values: self.values,
        }
    }
}

/// One partition of a distributed array.
#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    Dense(Matrix),
    Sparse(CsrMatrix),
}

impl Block {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            Block::Dense(m) => m.shape(),
            Block::Sparse(s) => s.shape(),
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, Block::Sparse(_))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            Block::Dense(m) => m.get(i, j),
            Block::Sparse(s) => s.get(i, j),
        }
    }

    pub fn to_dense(&self) -> Matrix {
        match self {
            Block::Dense(m) => m.clone(),
            Block::Sparse(s) => s.to_dense(),
        }
    }

    pub fn transpose(&self) -> Block {
        match self {
            Block::Dense(m) => Block::Dense(m.transpose()),
            Block::Sparse(s) => Block::Sparse(s.transpose()),
        }
    }

    pub fn submatrix(&self, rows: Range<usize>, cols: Range<usize>) -> Block {
        match self {
            Block::Dense(m) => Block::Dense(m.submatrix(rows, cols)),
            Block::Sparse(s) => Block::Sparse(s.submatrix(rows, cols)),
        }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Block {
        match self {
            Block::Dense(m) => Block::Dense(m.select_rows(idx)),
            Block::Sparse(s) => Block::Sparse(s.select_rows(idx)),
        }
    }

    /// Stacks blocks vertically; all must share storage kind and column count.
    pub fn vstack(parts: &[&Block], cols: usize, sparse: bool) -> Result<Block> {
        if sparse {
            let ms = parts.iter().map(|b| b.as_sparse()).collect::<Result<Vec<_>>>()?;
            Ok(Block::Sparse(CsrMatrix::vstack(ms, cols)?))
        } else {
            let ms = parts.iter().map(|b| b.as_dense()).collect::<Result<Vec<_>>>()?;
            Ok(Block::Dense(Matrix::vstack(ms, cols)?))
        }
    }

    /// Places blocks side by side; all must share storage kind and row count.
    pub fn hstack(parts: &[&Block], rows: usize, sparse: bool) -> Result<Block> {
        if sparse {
            let ms = parts.iter().map(|b| b.as_sparse()).collect::<Result<Vec<_>>>()?;
            Ok(Block::Sparse(CsrMatrix::hstack(&ms, rows)?))
        } else {
            let ms = parts.iter().map(|b| b.as_dense()).collect::<Result<Vec<_>>>()?;
            Ok(Block::Dense(Matrix::hstack(&ms, rows)?))
        }
    }

    pub fn as_dense(&self) -> Result<&Matrix> {
        match self {
            Block::Dense(m) => Ok(m),
            Block::Sparse(_) => Err(Error::Unsupported("expected a dense block".into())),
        }
    }

    pub fn as_sparse(&self) -> Result<&CsrMatrix> {
        match self {
            Block::Sparse(s) => Ok(s),
            Block::Dense(_) => Err(Error::Unsupported("expected a sparse block".into())),
        }
    }

    pub fn empty(rows: usize, cols: usize, sparse: bool) -> Block {
        if sparse {
            Block::Sparse(CsrMatrix::zeros(rows, cols))
        } else {
            Block::Dense(Matrix::zeros(rows, cols))
        }
    }

    /// Product of two blocks. Sparse times sparse stays sparse; any dense
    /// operand yields a dense result.
    pub fn matmul(&self, other: &Block) -> Result<Block> {
        let (ar, ac) = self.shape();
        let (br, bc) = other.shape();
        if ac != br {
            return arg_err(format!("matmul: {ar}x{ac} times {br}x{bc}"));
        }
        Ok(match (self, other) {
            (Block::Dense(a), Block::Dense(b)) => Block::Dense(a.matmul(b)?),
            (Block::Sparse(a), Block::Dense(b)) => Block::Dense(a.matmul_dense(b)),
            (Block::Dense(a), Block::Sparse(b)) => Block::Dense(dense_matmul_sparse(a, b)),
            (Block::Sparse(a), Block::Sparse(b)) => Block::Sparse(a.matmul_sparse(b)),
        })
    }
}
