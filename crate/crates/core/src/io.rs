//! Text ingestion and export.
//!
//! Dense text: one matrix row per line, fields separated by `,`, decimal
//! floats, no header unless requested. Values are written with 17 significant
//! digits in scientific notation (`{:.16e}`), which round-trips every `f64`.
//!
//! Triplet text: one `row,col,value` entry per line with zero-based indices.
//! A repeated coordinate keeps the value from its last line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::Path;

use crate::array::{cell_range, grid_len, DistArray};
use crate::block::{Block, CsrMatrix, Matrix};
use crate::error::{arg_err, Error, Result};
use crate::runtime::{payload, Runtime};

/// Renders a value the way [`save_dense_text`] does.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Byte offset and 1-based line number of each data line.
struct LineIndex {
    starts: Vec<(u64, usize)>,
    n_cols: usize,
}

fn index_lines(path: &Path, skip_header: bool) -> Result<LineIndex> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut starts = Vec::new();
    let mut n_cols = None;
    let mut offset = 0u64;
    let mut line_no = 0usize;
    let mut buf = Vec::new();
    loop {
        buf.clear();
        let n = reader.read_until(b'\n', &mut buf)?;
        if n == 0 {
            break;
        }
        line_no += 1;
        let start = offset;
        offset += n as u64;
        if skip_header && line_no == 1 {
            continue;
        }
        if n_cols.is_none() {
            let text = String::from_utf8_lossy(&buf);
            n_cols = Some(text.trim_end_matches(['\n', '\r']).split(',').count());
        }
        starts.push((start, line_no));
    }
    match n_cols {
        Some(n_cols) => Ok(LineIndex { starts, n_cols }),
        None => Err(Error::Parse { line: line_no.max(1), message: "no data lines".into() }),
    }
}

fn parse_line(text: &str, line: usize, n_cols: usize) -> Result<Vec<f64>> {
    let fields: Vec<&str> = text.split(',').collect();
    if fields.len() != n_cols {
        return Err(Error::Parse {
            line,
            message: format!("{} fields, expected {n_cols}", fields.len()),
        });
    }
    fields
        .iter()
        .map(|f| {
            f.trim().parse::<f64>().map_err(|e| Error::Parse {
                line,
                message: format!("'{}': {e}", f.trim()),
            })
        })
        .collect()
}

/// Loads a dense text matrix; one `load` task per row of blocks, each reading
/// its own contiguous range of lines.
pub fn load_dense_text(rt: &Runtime, path: impl AsRef<Path>, reg_block: (usize, usize)) -> Result<DistArray> {
    load_dense_text_opts(rt, path, reg_block, false)
}

/// Like [`load_dense_text`], optionally skipping one header line.
pub fn load_dense_text_opts(
    rt: &Runtime,
    path: impl AsRef<Path>,
    reg_block: (usize, usize),
    skip_header: bool,
) -> Result<DistArray> {
    let path = path.as_ref().to_path_buf();
    let index = index_lines(&path, skip_header)?;
    let (n_rows, n_cols) = (index.starts.len(), index.n_cols);
    let (p, q) = reg_block;
    if p == 0 || q == 0 || p > n_rows || q > n_cols {
        return arg_err(format!("block shape {p}x{q} must be within 1x1..={n_rows}x{n_cols}"));
    }
    let col_ranges: Vec<_> = (0..grid_len(n_cols, q)).map(|j| cell_range(j, n_cols, q)).collect();
    let blocks = (0..grid_len(n_rows, p))
        .map(|i| {
            let lines = index.starts[cell_range(i, n_rows, p)].to_vec();
            let path = path.clone();
            let col_ranges = col_ranges.clone();
            rt.submit("load", vec![], col_ranges.len(), move |_| {
                let mut file = File::open(&path)?;
                file.seek(SeekFrom::Start(lines[0].0))?;
                let mut reader = BufReader::new(file);
                let mut data = Vec::with_capacity(lines.len() * n_cols);
                let mut text = String::new();
                for &(_, line_no) in &lines {
                    text.clear();
                    reader.read_line(&mut text)?;
                    data.extend(parse_line(text.trim_end_matches(['\n', '\r']), line_no, n_cols)?);
                }
                let rows = Matrix::new(lines.len(), n_cols, data)?;
                Ok(col_ranges
                    .iter()
                    .map(|c| payload(Block::Dense(rows.submatrix(0..lines.len(), c.clone()))))
                    .collect())
            })
        })
        .collect::<Result<Vec<_>>>()?;
    DistArray::from_grid(rt, (n_rows, n_cols), reg_block, blocks, false)
}

/// Loads `row,col,value` triplets into a sparse array, routing each entry to
/// the block that owns it.
pub fn load_triplets(
    rt: &Runtime,
    path: impl AsRef<Path>,
    n_rows: usize,
    n_cols: usize,
    reg_block: (usize, usize),
) -> Result<DistArray> {
    let (p, q) = reg_block;
    if n_rows == 0 || n_cols == 0 || p == 0 || q == 0 || p > n_rows || q > n_cols {
        return arg_err(format!("invalid shape {n_rows}x{n_cols} with block {p}x{q}"));
    }
    let mut text = String::new();
    File::open(path.as_ref())?.read_to_string(&mut text)?;
    let (gr, gc) = (grid_len(n_rows, p), grid_len(n_cols, q));
    let mut routed: Vec<Vec<Vec<(usize, usize, f64)>>> = vec![vec![Vec::new(); gc]; gr];
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::Parse { line, message: format!("{} fields, expected 3", fields.len()) });
        }
        let bad = |what: &str, f: &str| Error::Parse { line, message: format!("bad {what} '{f}'") };
        let r: usize = fields[0].parse().map_err(|_| bad("row", fields[0]))?;
        let c: usize = fields[1].parse().map_err(|_| bad("column", fields[1]))?;
        let v: f64 = fields[2].parse().map_err(|_| bad("value", fields[2]))?;
        if r >= n_rows || c >= n_cols {
            return Err(Error::Parse {
                line,
                message: format!("({r}, {c}) outside {n_rows}x{n_cols}"),
            });
        }
        routed[r / p][c / q].push((r % p, c % q, v));
    }
    let blocks = routed
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            row.into_iter()
                .enumerate()
                .map(|(j, entries)| {
                    let rows = cell_range(i, n_rows, p).len();
                    let cols = cell_range(j, n_cols, q).len();
                    Ok(rt.put_value(Block::Sparse(CsrMatrix::from_triplets(rows, cols, &entries)?)))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    DistArray::from_grid(rt, (n_rows, n_cols), reg_block, blocks, true)
}

/// Writes a matrix in the dense text format.
pub fn write_dense_text(m: &Matrix, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|&v| format_value(v)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Collects `a` and writes it in the dense text format.
pub fn save_dense_text(a: &DistArray, path: impl AsRef<Path>) -> Result<()> {
    write_dense_text(&a.collect()?, path)
}
