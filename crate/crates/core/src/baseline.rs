//! Row-partitioned baseline: a dataset is an ordered list of subsets, each
//! pairing a samples block with an optional labels block.
//!
//! Operations here deliberately avoid collection parameters: every task reads
//! a fixed list of single handles. That is what makes transposing cost
//! `N^2 + N` tasks and shuffling `N * min(N, S) + N` tasks, against `N` and
//! `2N` for the blocked array.

use crate::array::{cell_range, grid_len};
use crate::block::{Block, Matrix};
use crate::error::{arg_err, Error, Result};
use crate::runtime::{payload, Arg, Handle, Runtime};
use crate::shuffle;

/// One row partition of a [`SubsetDataset`].
#[derive(Clone, Debug)]
pub struct Subset {
    samples: Handle,
    labels: Option<Handle>,
    rows: usize,
    n_features: usize,
}

impl Subset {
    /// Registers in-memory samples (and optional labels, one per row) as a ready subset.
    pub fn from_matrix(rt: &Runtime, samples: &Matrix, labels: Option<&[f64]>) -> Result<Subset> {
        if let Some(l) = labels {
            if l.len() != samples.rows() {
                return arg_err(format!("{} labels for {} samples", l.len(), samples.rows()));
            }
        }
        Ok(Subset {
            samples: rt.put_value(Block::Dense(samples.clone())),
            labels: labels.map(|l| rt.put_value(Block::Dense(Matrix::new(l.len(), 1, l.to_vec()).unwrap()))),
            rows: samples.rows(),
            n_features: samples.cols(),
        })
    }

    pub fn samples(&self) -> &Handle {
        &self.samples
    }

    pub fn labels(&self) -> Option<&Handle> {
        self.labels.as_ref()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
}

/// Samples and labels that travel together between shuffle tasks.
struct SubsetPart {
    samples: Block,
    labels: Option<Block>,
}

/// The legacy row-partitioned structure.
#[derive(Clone, Debug)]
pub struct SubsetDataset {
    rt: Runtime,
    subsets: Vec<Subset>,
    n_features: usize,
    subset_size: usize,
}

impl SubsetDataset {
    /// Splits rows into subsets of `subset_size` (the last may be smaller);
    /// one task per subset.
    pub fn from_dense(rt: &Runtime, values: &[Vec<f64>], subset_size: usize) -> Result<SubsetDataset> {
        Self::from_matrix(rt, &Matrix::from_rows(values)?, None, subset_size)
    }

    pub fn from_matrix(
        rt: &Runtime,
        values: &Matrix,
        labels: Option<&[f64]>,
        subset_size: usize,
    ) -> Result<SubsetDataset> {
        let (n, m) = values.shape();
        if n == 0 || m == 0 {
            return arg_err("empty dataset");
        }
        if subset_size == 0 || subset_size > n {
            return arg_err(format!("subset size {subset_size} must be within 1..={n}"));
        }
        if let Some(l) = labels {
            if l.len() != n {
                return arg_err(format!("{} labels for {n} samples", l.len()));
            }
        }
        let subsets = (0..grid_len(n, subset_size))
            .map(|i| {
                let range = cell_range(i, n, subset_size);
                let samples = values.submatrix(range.clone(), 0..m);
                let label_block = labels.map(|l| Matrix::new(range.len(), 1, l[range.clone()].to_vec()).unwrap());
                let arity = if label_block.is_some() { 2 } else { 1 };
                let out = rt.submit("dataset_load", vec![], arity, move |_| {
                    let mut out = vec![payload(Block::Dense(samples))];
                    if let Some(l) = label_block {
                        out.push(payload(Block::Dense(l)));
                    }
                    Ok(out)
                })?;
                Ok(Subset {
                    samples: out[0].clone(),
                    labels: out.get(1).cloned(),
                    rows: range.len(),
                    n_features: m,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SubsetDataset { rt: rt.clone(), subsets, n_features: m, subset_size })
    }

    pub fn runtime(&self) -> &Runtime {
        &self.rt
    }

    pub fn subsets(&self) -> &[Subset] {
        &self.subsets
    }

    pub fn n_subsets(&self) -> usize {
        self.subsets.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_samples(&self) -> usize {
        self.subsets.iter().map(|s| s.rows).sum()
    }

    /// Regular subset size S.
    pub fn subset_size_regular(&self) -> usize {
        self.subset_size
    }

    /// Row count of subset `i`.
    pub fn subset_size(&self, i: usize) -> Result<usize> {
        self.subsets
            .get(i)
            .map(|s| s.rows)
            .ok_or_else(|| Error::Index(format!("subset {i} of {}", self.subsets.len())))
    }

    /// Returns a dataset with `subset` appended.
    pub fn append(&self, subset: Subset) -> Result<SubsetDataset> {
        if subset.n_features != self.n_features {
            return arg_err(format!(
                "subset has {} features, dataset has {}",
                subset.n_features, self.n_features
            ));
        }
        if subset.labels.is_some() != self.has_labels() {
            return arg_err("subset and dataset disagree on labels");
        }
        let mut out = self.clone();
        out.subsets.push(subset);
        Ok(out)
    }

    pub fn has_labels(&self) -> bool {
        self.subsets.iter().all(|s| s.labels.is_some())
    }

    pub fn collect_samples(&self) -> Result<Matrix> {
        let blocks = self
            .subsets
            .iter()
            .map(|s| self.rt.fetch_as::<Block>(&s.samples).map(|b| b.to_dense()))
            .collect::<Result<Vec<_>>>()?;
        Matrix::vstack(&blocks, self.n_features)
    }

    pub fn collect_labels(&self) -> Result<Option<Vec<f64>>> {
        if !self.has_labels() {
            return Ok(None);
        }
        let mut out = Vec::with_capacity(self.n_samples());
        for s in &self.subsets {
            let b = self.rt.fetch_as::<Block>(s.labels.as_ref().unwrap())?;
            out.extend_from_slice(b.to_dense().data());
        }
        Ok(Some(out))
    }

    /// Transposes the samples: each subset is cut into `N` column parts by
    /// `N^2` split tasks, and `N` merge tasks assemble the new subsets.
    /// Labels are dropped.
    pub fn transpose(&self) -> Result<SubsetDataset> {
        let n = self.subsets.len();
        let m = self.n_features;
        let new_size = m.div_ceil(n);
        let ranges: Vec<_> = (0..n)
            .map(|k| {
                let start = (k * new_size).min(m);
                start..((k + 1) * new_size).min(m)
            })
            .collect();

        let mut parts: Vec<Vec<Handle>> = vec![Vec::with_capacity(n); n];
        for s in &self.subsets {
            let rows = s.rows;
            for (k, cols) in ranges.iter().enumerate() {
                let cols = cols.clone();
                let h = self.rt.submit1("dataset_transpose", vec![Arg::Data(s.samples.clone())], move |a| {
                    let b = a.one::<Block>(0)?;
                    Ok(payload(b.submatrix(0..rows, cols).transpose()))
                })?;
                parts[k].push(h);
            }
        }

        let n_samples = self.n_samples();
        let subsets = ranges
            .iter()
            .zip(parts)
            .map(|(cols, incoming)| {
                let height = cols.len();
                let args = incoming.into_iter().map(Arg::Data).collect();
                let h = self.rt.submit1("dataset_transpose", args, move |a| {
                    let pieces = (0..a.len()).map(|i| a.one::<Block>(i)).collect::<Result<Vec<_>>>()?;
                    let sparse = pieces.first().is_some_and(|b| b.is_sparse());
                    Ok(payload(Block::hstack(&pieces, height, sparse)?))
                })?;
                Ok(Subset { samples: h, labels: None, rows: height, n_features: n_samples })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SubsetDataset {
            rt: self.rt.clone(),
            subsets,
            n_features: n_samples,
            subset_size: new_size.max(1),
        })
    }

    /// Pseudo-shuffle: every subset is split into `min(N, S)` parts, one task
    /// per part, and `N` merge tasks each combine the parts addressed to them.
    /// Samples and labels move together.
    pub fn shuffle(&self, seed: u64) -> Result<SubsetDataset> {
        let n = self.subsets.len();
        let parts_per_subset = n.min(self.subset_size);
        let sizes: Vec<usize> = self.subsets.iter().map(|s| s.rows).collect();
        let counts = shuffle::plan_counts(&sizes, &sizes, seed);
        let labeled = self.has_labels();

        // incoming[j]: handles of parts addressed to destination j, in source order
        let mut incoming: Vec<Vec<Handle>> = vec![Vec::new(); n];
        for (i, s) in self.subsets.iter().enumerate() {
            let dests: Vec<Option<usize>> = if n <= self.subset_size {
                (0..n).map(Some).collect()
            } else {
                let mut d: Vec<Option<usize>> =
                    (0..n).filter(|&j| counts[i][j] > 0).map(Some).collect();
                d.resize(parts_per_subset, None);
                d
            };
            debug_assert_eq!(dests.len(), parts_per_subset);
            let mut args = vec![Arg::Data(s.samples.clone())];
            if let Some(l) = &s.labels {
                args.push(Arg::Data(l.clone()));
            }
            for dest in dests {
                let counts_row = counts[i].clone();
                let rows = s.rows;
                let h = self.rt.submit1("dataset_shuffle", args.clone(), move |a| {
                    let samples = a.one::<Block>(0)?;
                    let labels = if labeled { Some(a.one::<Block>(1)?) } else { None };
                    let picked = match dest {
                        Some(j) => shuffle::part_rows(&shuffle::split_order(seed, i, rows), &counts_row, j),
                        None => Vec::new(),
                    };
                    Ok(payload(SubsetPart {
                        samples: samples.select_rows(&picked),
                        labels: labels.map(|l| l.select_rows(&picked)),
                    }))
                })?;
                if let Some(j) = dest {
                    incoming[j].push(h);
                }
            }
        }

        let m = self.n_features;
        let subsets = incoming
            .into_iter()
            .enumerate()
            .map(|(j, parts)| {
                let rows = sizes[j];
                let args = parts.into_iter().map(Arg::Data).collect();
                let arity = if labeled { 2 } else { 1 };
                let out = self.rt.submit("dataset_shuffle", args, arity, move |a| {
                    let parts = (0..a.len()).map(|i| a.one::<SubsetPart>(i)).collect::<Result<Vec<_>>>()?;
                    let order = shuffle::merge_order(seed, j, rows);
                    let sparse = parts.first().is_some_and(|p| p.samples.is_sparse());
                    let samples: Vec<&Block> = parts.iter().map(|p| &p.samples).collect();
                    let mut out = vec![payload(Block::vstack(&samples, m, sparse)?.select_rows(&order))];
                    if labeled {
                        let labels: Vec<&Block> = parts.iter().map(|p| p.labels.as_ref().unwrap()).collect();
                        out.push(payload(Block::vstack(&labels, 1, false)?.select_rows(&order)));
                    }
                    Ok(out)
                })?;
                Ok(Subset {
                    samples: out[0].clone(),
                    labels: out.get(1).cloned(),
                    rows,
                    n_features: m,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SubsetDataset { subsets, ..self.clone() })
    }

    /// Per-feature minimum and maximum as two `1 x M` rows: one partial task
    /// per subset followed by one merge task.
    pub fn minmax_features(&self) -> Result<(Matrix, Matrix)> {
        let m = self.n_features;
        let partials = self
            .subsets
            .iter()
            .map(|s| {
                self.rt.submit1("dataset_minmax", vec![Arg::Data(s.samples.clone())], move |a| {
                    let b = a.one::<Block>(0)?.to_dense();
                    let mut lo = vec![f64::INFINITY; m];
                    let mut hi = vec![f64::NEG_INFINITY; m];
                    for i in 0..b.rows() {
                        for (j, &v) in b.row(i).iter().enumerate() {
                            lo[j] = lo[j].min(v);
                            hi[j] = hi[j].max(v);
                        }
                    }
                    Ok(payload((lo, hi)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let merged = self.rt.submit1(
            "dataset_minmax",
            partials.into_iter().map(Arg::Data).collect(),
            move |a| {
                let mut lo = vec![f64::INFINITY; m];
                let mut hi = vec![f64::NEG_INFINITY; m];
                for i in 0..a.len() {
                    let (pl, ph) = a.one::<(Vec<f64>, Vec<f64>)>(i)?;
                    for j in 0..m {
                        lo[j] = lo[j].min(pl[j]);
                        hi[j] = hi[j].max(ph[j]);
                    }
                }
                Ok(payload((lo, hi)))
            },
        )?;
        let (lo, hi) = &*self.rt.fetch_as::<(Vec<f64>, Vec<f64>)>(&merged)?;
        Ok((Matrix::new(1, m, lo.clone())?, Matrix::new(1, m, hi.clone())?))
    }
}

/// Tasks a dataset transpose emits for `n` subsets.
pub fn transpose_task_count(n: usize) -> usize {
    n * n + n
}

/// Tasks a dataset shuffle emits for `n` subsets of size `s`.
pub fn shuffle_task_count(n: usize, s: usize) -> usize {
    n * n.min(s) + n
}
