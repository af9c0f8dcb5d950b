//! Pseudo-shuffle planning shared by the blocked array and the row-partitioned
//! baseline.
//!
//! Every source partition is split into one part per destination partition;
//! each destination merges the parts addressed to it. Part sizes are drawn so
//! that every destination receives exactly its target number of rows, which
//! is the same as assigning every row a uniformly random destination slot.

use rand::seq::SliceRandom;

use crate::array::rng_for;

const PLAN: u64 = 0x706c_616e;
const SPLIT: u64 = 0x7370_6c74;
const MERGE: u64 = 0x6d72_6765;

/// `counts[i][j]` is the number of rows source `i` sends to destination `j`.
pub(crate) fn plan_counts(src_sizes: &[usize], dst_sizes: &[usize], seed: u64) -> Vec<Vec<usize>> {
    debug_assert_eq!(src_sizes.iter().sum::<usize>(), dst_sizes.iter().sum::<usize>());
    let mut slots: Vec<usize> = dst_sizes
        .iter()
        .enumerate()
        .flat_map(|(j, &n)| std::iter::repeat_n(j, n))
        .collect();
    slots.shuffle(&mut rng_for(seed, &[PLAN]));
    let mut counts = vec![vec![0; dst_sizes.len()]; src_sizes.len()];
    let mut offset = 0;
    for (i, &n) in src_sizes.iter().enumerate() {
        for &j in &slots[offset..offset + n] {
            counts[i][j] += 1;
        }
        offset += n;
    }
    counts
}

/// Local row order used when splitting source partition `i`.
pub(crate) fn split_order(seed: u64, i: usize, n: usize) -> Vec<usize> {
    permutation(seed, &[SPLIT, i as u64], n)
}

/// Row order applied to the concatenated parts received by destination `j`.
pub(crate) fn merge_order(seed: u64, j: usize, n: usize) -> Vec<usize> {
    permutation(seed, &[MERGE, j as u64], n)
}

fn permutation(seed: u64, parts: &[u64], n: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng_for(seed, parts));
    idx
}

/// Rows (in split order) that source `i` sends to destination `j`.
pub(crate) fn part_rows(order: &[usize], counts_row: &[usize], j: usize) -> Vec<usize> {
    let start: usize = counts_row[..j].iter().sum();
    order[start..start + counts_row[j]].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_respect_margins() {
        let src = [5, 5, 5, 2];
        let counts = plan_counts(&src, &src, 11);
        for (i, row) in counts.iter().enumerate() {
            assert_eq!(row.iter().sum::<usize>(), src[i]);
        }
        for j in 0..src.len() {
            assert_eq!(counts.iter().map(|r| r[j]).sum::<usize>(), src[j]);
        }
        assert_eq!(counts, plan_counts(&src, &src, 11));
    }

    #[test]
    fn parts_cover_partition() {
        let order = split_order(3, 0, 7);
        let counts = [2, 0, 5];
        let mut all: Vec<usize> = (0..3).flat_map(|j| part_rows(&order, &counts, j)).collect();
        all.sort();
        assert_eq!(all, (0..7).collect::<Vec<_>>());
    }
}
