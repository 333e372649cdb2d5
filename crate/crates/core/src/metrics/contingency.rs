use crate::error::{Error, Result};
use crate::partition::Partition;

/// Joint block counts `n_ij = |U_i ∩ V_j|` of two partitions of the same points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContingencyTable {
    k1: usize,
    k2: usize,
    counts: Vec<u64>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    m: u64,
}

impl ContingencyTable {
    pub fn new(u: &Partition, v: &Partition) -> Result<Self> {
        if u.m() != v.m() {
            return Err(Error::Dimension {
                context: "partition lengths",
                expected: u.m(),
                found: v.m(),
            });
        }
        let (k1, k2) = (u.k(), v.k());
        let mut counts = vec![0u64; k1 * k2];
        let mut row_sums = vec![0u64; k1];
        let mut col_sums = vec![0u64; k2];
        for (&a, &b) in u.labels().iter().zip(v.labels()) {
            counts[a * k2 + b] += 1;
            row_sums[a] += 1;
            col_sums[b] += 1;
        }
        Ok(Self {
            k1,
            k2,
            counts,
            row_sums,
            col_sums,
            m: u.m() as u64,
        })
    }

    /// Table from a row-major `k1 × k2` count matrix. Empty rows or columns
    /// are allowed and behave as absent blocks.
    pub fn from_counts(k1: usize, k2: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != k1 * k2 {
            return Err(Error::Dimension {
                context: "contingency counts",
                expected: k1 * k2,
                found: counts.len(),
            });
        }
        let mut row_sums = vec![0u64; k1];
        let mut col_sums = vec![0u64; k2];
        for (pos, &c) in counts.iter().enumerate() {
            row_sums[pos / k2] += c;
            col_sums[pos % k2] += c;
        }
        let m = row_sums.iter().sum();
        Ok(Self {
            k1,
            k2,
            counts,
            row_sums,
            col_sums,
            m,
        })
    }

    /// Table of two raw label vectors with labels below `k1` and `k2`.
    pub(crate) fn from_label_slices(a: &[usize], k1: usize, b: &[usize], k2: usize) -> Self {
        let mut counts = vec![0u64; k1 * k2];
        for (&x, &y) in a.iter().zip(b) {
            counts[x * k2 + y] += 1;
        }
        Self::from_counts(k1, k2, counts).expect("sized above")
    }

    /// True when every non-empty row and column holds a single non-zero cell,
    /// i.e. the two partitions coincide up to relabeling.
    pub fn is_bijective(&self) -> bool {
        let rows_ok = (0..self.k1).all(|i| self.row(i).iter().filter(|&&c| c > 0).count() <= 1);
        let cols_ok = (0..self.k2)
            .all(|j| (0..self.k1).filter(|&i| self.get(i, j) > 0).count() <= 1);
        rows_ok && cols_ok
    }

    pub fn k1(&self) -> usize {
        self.k1
    }

    pub fn k2(&self) -> usize {
        self.k2
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.k2 + j]
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.counts[i * self.k2..(i + 1) * self.k2]
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .map(move |(pos, &c)| (pos / self.k2, pos % self.k2, c))
    }

    pub fn pair_counts(&self) -> PairCounts {
        let same_both: u64 = self.counts.iter().map(|&c| choose2(c)).sum();
        let same_u: u64 = self.row_sums.iter().map(|&c| choose2(c)).sum();
        let same_v: u64 = self.col_sums.iter().map(|&c| choose2(c)).sum();
        let total = choose2(self.m);
        PairCounts {
            n11: same_both,
            n10: same_u - same_both,
            n01: same_v - same_both,
            n00: total + same_both - same_u - same_v,
        }
    }
}

pub fn contingency(u: &Partition, v: &Partition) -> Result<ContingencyTable> {
    ContingencyTable::new(u, v)
}

/// Pair classification: `n11` together in both, `n10` together only in U,
/// `n01` together only in V, `n00` apart in both.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairCounts {
    pub n00: u64,
    pub n01: u64,
    pub n10: u64,
    pub n11: u64,
}

impl PairCounts {
    pub fn total(&self) -> u64 {
        self.n00 + self.n01 + self.n10 + self.n11
    }
}

#[inline]
pub(crate) fn choose2(c: u64) -> u64 {
    c * c.saturating_sub(1) / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(l: &[usize]) -> Partition {
        Partition::from_labels(l).unwrap()
    }

    #[test]
    fn diagonal_table() {
        let u = part(&[1, 1, 2, 2]);
        let t = ContingencyTable::new(&u, &u).unwrap();
        assert_eq!((t.row(0), t.row(1)), (&[2, 0][..], &[0, 2][..]));
    }

    #[test]
    fn crossed_table() {
        let t = ContingencyTable::new(&part(&[1, 1, 2, 2]), &part(&[1, 2, 1, 2])).unwrap();
        assert_eq!((t.row(0), t.row(1)), (&[1, 1][..], &[1, 1][..]));
        let pc = t.pair_counts();
        assert_eq!((pc.n11, pc.n00, pc.total()), (0, 2, 6));
    }

    #[test]
    fn single_block_row_is_v_sizes() {
        let v = part(&[0, 1, 1, 2, 2, 2]);
        let t = ContingencyTable::new(&part(&[0; 6]), &v).unwrap();
        assert_eq!(t.k1(), 1);
        assert_eq!(t.row(0), &[1, 2, 3]);
        assert_eq!(t.col_sums(), &[1, 2, 3]);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            ContingencyTable::new(&part(&[0, 1]), &part(&[0])),
            Err(Error::Dimension { .. })
        ));
    }
}
