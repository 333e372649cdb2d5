use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};

/// A partition of `m` points into `k` non-empty blocks.
///
/// Labels are zero-based and canonical: block ids are assigned in order of
/// first appearance, so two partitions are equal up to relabeling exactly when
/// their label vectors are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn from_labels<T: Eq + Hash + Copy>(raw: &[T]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyInput("partition has no points".into()));
        }
        let mut ids: HashMap<T, usize> = HashMap::new();
        let labels = raw
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(*l).or_insert(next)
            })
            .collect();
        Ok(Self {
            labels,
            k: ids.len(),
        })
    }

    /// Two-block (or one-block) partition from a membership indicator.
    pub fn from_indicator(member: &[bool]) -> Result<Self> {
        Self::from_labels(member)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn m(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Point indices of each block, in increasing order.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            blocks[l].push(i);
        }
        blocks
    }

    /// The partition induced on the points at `indices` (relabelled compactly).
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        let raw: Vec<usize> = indices.iter().map(|&i| self.labels[i]).collect();
        Self::from_labels(&raw)
    }

    pub fn same_up_to_relabeling(&self, other: &Self) -> bool {
        self == other
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn compact_relabeling() {
        let p = Partition::from_labels(&[7, 7, 3, 9, 3]).unwrap();
        assert_eq!(p.labels(), &[0, 0, 1, 2, 1]);
        assert_eq!(p.k(), 3);
        assert_eq!(p.block_sizes(), vec![2, 2, 1]);
        assert_eq!(p.blocks(), vec![vec![0, 1], vec![2, 4], vec![3]]);
    }

    #[test]
    fn indicator_single_block() {
        let p = Partition::from_indicator(&[true, true]).unwrap();
        assert_eq!(p.k(), 1);
        assert!(Partition::from_labels::<u8>(&[]).is_err());
    }

    proptest! {
        #[test]
        fn relabeling_gives_equal_partition(raw in prop::collection::vec(0usize..5, 1..30), shift in 1usize..100) {
            let a = Partition::from_labels(&raw).unwrap();
            let relabeled: Vec<usize> = raw.iter().map(|l| (l * 7 + shift) % 101).collect();
            let b = Partition::from_labels(&relabeled).unwrap();
            prop_assert!(a.same_up_to_relabeling(&b));
            prop_assert_eq!(a.block_sizes().iter().sum::<usize>(), raw.len());
        }
    }
}
