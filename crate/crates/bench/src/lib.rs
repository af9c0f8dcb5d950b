//! Inputs shared by the partitioning benchmarks in `benches/`.

use dsarray::{DistArray, Result, Runtime, SubsetDataset};

/// The same random `(n_parts * part) x (n_parts * part)` matrix as a ds-array
/// with `part x part` blocks and as a dataset of `part`-row subsets, so both
/// structures are split into `n_parts` row partitions.
pub fn square_inputs(rt: &Runtime, n_parts: usize, part: usize, seed: u64) -> Result<(DistArray, SubsetDataset)> {
    let side = n_parts * part;
    let a = DistArray::random(rt, side, side, (part, part), seed)?;
    let ds = SubsetDataset::from_matrix(rt, &a.collect()?, None, part)?;
    rt.barrier()?;
    Ok((a, ds))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_structures_hold_the_same_rows() {
        let rt = Runtime::new(2);
        let (a, ds) = square_inputs(&rt, 3, 4, 1).unwrap();
        assert_eq!(a.grid_shape(), (3, 3));
        assert_eq!(ds.n_subsets(), 3);
        assert_eq!(a.collect().unwrap(), ds.collect_samples().unwrap());
    }
}
