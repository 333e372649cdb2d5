//! Partition similarity: pair counting, information-theoretic indices, their
//! permutation-model adjustments, minimal matching distance and Jaccard.
//!
//! All logarithms are natural (nats).

mod contingency;
mod matching;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use contingency::{contingency, ContingencyTable, PairCounts};
pub use matching::min_cost_assignment;

use crate::error::{Error, Result};
use crate::partition::Partition;
use contingency::choose2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum ScoreKind {
    Ri,
    Ari,
    Mi,
    Ami,
    Mmd,
    Jaccard,
}

impl ScoreKind {
    pub fn name(self) -> &'static str {
        match self {
            ScoreKind::Ri => "ri",
            ScoreKind::Ari => "ari",
            ScoreKind::Mi => "mi",
            ScoreKind::Ami => "ami",
            ScoreKind::Mmd => "mmd",
            ScoreKind::Jaccard => "jaccard",
        }
    }

    /// ARI and AMI: bounded above by one with zero expectation under the permutation model.
    pub fn is_adjusted(self) -> bool {
        matches!(self, ScoreKind::Ari | ScoreKind::Ami)
    }
}

impl fmt::Display for ScoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScoreKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "ri" => ScoreKind::Ri,
            "ari" => ScoreKind::Ari,
            "mi" => ScoreKind::Mi,
            "ami" => ScoreKind::Ami,
            "mmd" => ScoreKind::Mmd,
            "jaccard" => ScoreKind::Jaccard,
            other => return Err(Error::Config(format!("unknown score kind `{other}`"))),
        })
    }
}

/// Value of an adjusted index. `degenerate` is set when the normaliser
/// `max − E` vanished and the value came from the identical-or-not convention.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdjustedScore {
    pub value: f64,
    pub degenerate: bool,
}

pub fn rand_index(u: &Partition, v: &Partition) -> Result<f64> {
    let t = ContingencyTable::new(u, v)?;
    if t.m() < 2 {
        return Err(Error::Undefined("Rand index needs at least two points".into()));
    }
    let pc = t.pair_counts();
    Ok((pc.n00 + pc.n11) as f64 / pc.total() as f64)
}

pub fn mutual_information(u: &Partition, v: &Partition) -> Result<f64> {
    Ok(mutual_information_of(&ContingencyTable::new(u, v)?))
}

/// `Σ_ij (n_ij/m) ln[(n_ij m)/(a_i b_j)]`; empty cells contribute nothing.
pub fn mutual_information_of(t: &ContingencyTable) -> f64 {
    let m = t.m() as f64;
    let (a, b) = (t.row_sums(), t.col_sums());
    t.cells()
        .filter(|&(_, _, c)| c > 0)
        .map(|(i, j, c)| {
            let ratio = (c * t.m()) as f64 / (a[i] * b[j]) as f64;
            c as f64 / m * ratio.ln()
        })
        .sum()
}

/// Shannon entropy of a block-size profile. Written so that `MI(U, U)`
/// evaluates to exactly this value.
pub fn entropy(sizes: &[u64]) -> f64 {
    let m: u64 = sizes.iter().sum();
    sizes
        .iter()
        .filter(|&&a| a > 0)
        .map(|&a| {
            let ratio = (a * m) as f64 / (a * a) as f64;
            a as f64 / m as f64 * ratio.ln()
        })
        .sum()
}

/// Exact `E[MI]` under the permutation (hypergeometric) model with the
/// table's margins.
pub fn expected_mutual_information(t: &ContingencyTable) -> f64 {
    let n = t.m() as usize;
    let mut log_fact = vec![0.0; n + 1];
    for i in 1..=n {
        log_fact[i] = log_fact[i - 1] + (i as f64).ln();
    }
    let nf = n as f64;
    let mut emi = 0.0;
    for &a in t.row_sums() {
        let a = a as usize;
        for &b in t.col_sums() {
            let b = b as usize;
            let lo = (a + b).saturating_sub(n).max(1);
            let hi = a.min(b);
            let base = log_fact[a] + log_fact[b] + log_fact[n - a] + log_fact[n - b] - log_fact[n];
            for nij in lo..=hi {
                let log_p = base
                    - log_fact[nij]
                    - log_fact[a - nij]
                    - log_fact[b - nij]
                    - log_fact[n + nij - a - b];
                let term = nij as f64 / nf * (nf * nij as f64 / (a as f64 * b as f64)).ln();
                emi += term * log_p.exp();
            }
        }
    }
    emi
}

fn normalised(num: f64, den: f64, scale: f64, t: &ContingencyTable) -> AdjustedScore {
    if den.abs() <= 1e-12 * scale.max(1.0) {
        return AdjustedScore {
            value: if t.is_bijective() { 1.0 } else { 0.0 },
            degenerate: true,
        };
    }
    AdjustedScore {
        value: num / den,
        degenerate: false,
    }
}

/// Hubert–Arabie adjusted Rand index.
pub fn adjusted_rand_index(u: &Partition, v: &Partition) -> Result<AdjustedScore> {
    adjusted_rand_index_of(&ContingencyTable::new(u, v)?)
}

pub fn adjusted_rand_index_of(t: &ContingencyTable) -> Result<AdjustedScore> {
    if t.m() < 2 {
        return Err(Error::Undefined("adjusted Rand index needs at least two points".into()));
    }
    let index: u64 = t.cells().map(|(_, _, c)| choose2(c)).sum();
    let sum_a: u64 = t.row_sums().iter().map(|&c| choose2(c)).sum();
    let sum_b: u64 = t.col_sums().iter().map(|&c| choose2(c)).sum();
    let total = choose2(t.m()) as f64;
    let (sum_a, sum_b) = (sum_a as f64, sum_b as f64);
    let expected = sum_a * sum_b / total;
    let max = 0.5 * (sum_a + sum_b);
    Ok(normalised(index as f64 - expected, max - expected, max, t))
}

/// Adjusted mutual information normalised by `max(H(U), H(V))`.
pub fn adjusted_mutual_information(u: &Partition, v: &Partition) -> Result<AdjustedScore> {
    Ok(adjusted_mutual_information_of(&ContingencyTable::new(u, v)?))
}

pub fn adjusted_mutual_information_of(t: &ContingencyTable) -> AdjustedScore {
    let mi = mutual_information_of(t);
    let emi = expected_mutual_information(t);
    let h = entropy(t.row_sums()).max(entropy(t.col_sums()));
    normalised(mi - emi, h - emi, h, t)
}

/// [`adjusted`] evaluated on a precomputed table.
pub fn adjusted_of(kind: ScoreKind, t: &ContingencyTable) -> Result<AdjustedScore> {
    match kind {
        ScoreKind::Ri | ScoreKind::Ari => adjusted_rand_index_of(t),
        ScoreKind::Mi | ScoreKind::Ami => Ok(adjusted_mutual_information_of(t)),
        other => Err(Error::Config(format!("no adjusted form of `{other}`"))),
    }
}

/// `r*` for `kind`: RI and ARI give the adjusted Rand index, MI and AMI the
/// adjusted mutual information.
pub fn adjusted(kind: ScoreKind, u: &Partition, v: &Partition) -> Result<AdjustedScore> {
    adjusted_of(kind, &ContingencyTable::new(u, v)?)
}

/// Minimum number of points whose labels disagree after optimally
/// permuting the labels of `v`.
pub fn minimal_matching_distance(u: &Partition, v: &Partition) -> Result<usize> {
    let t = ContingencyTable::new(u, v)?;
    let size = t.k1().max(t.k2());
    let mut cost = vec![0.0; size * size];
    for (i, j, c) in t.cells() {
        cost[i * size + j] = -(c as f64);
    }
    let assignment = min_cost_assignment(&cost, size);
    let matched: u64 = assignment
        .iter()
        .enumerate()
        .filter(|&(i, &j)| i < t.k1() && j < t.k2())
        .map(|(i, &j)| t.get(i, j))
        .sum();
    Ok((t.m() - matched) as usize)
}

/// `|A ∩ B| / |A ∪ B|` over index sets (duplicates ignored); 1 when both are empty.
pub fn jaccard(a: &[usize], b: &[usize]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    a.dedup();
    b.sort_unstable();
    b.dedup();
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let (mut i, mut j, mut inter) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    inter as f64 / (a.len() + b.len() - inter) as f64
}

/// Any partition-comparison score as a real number.
pub fn score(kind: ScoreKind, u: &Partition, v: &Partition) -> Result<f64> {
    match kind {
        ScoreKind::Ri => rand_index(u, v),
        ScoreKind::Mi => mutual_information(u, v),
        ScoreKind::Ari | ScoreKind::Ami => adjusted(kind, u, v).map(|s| s.value),
        ScoreKind::Mmd => minimal_matching_distance(u, v).map(|d| d as f64),
        ScoreKind::Jaccard => Err(Error::Config(
            "jaccard compares point sets, not partitions".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn part(l: &[usize]) -> Partition {
        Partition::from_labels(l).unwrap()
    }

    #[test]
    fn rand_index_examples() {
        let u = part(&[1, 1, 2, 2]);
        assert_eq!(rand_index(&u, &u).unwrap(), 1.0);
        assert_eq!(rand_index(&u, &part(&[1, 2, 1, 2])).unwrap(), 2.0 / 6.0);
        assert_eq!(rand_index(&part(&[1, 2, 3, 4]), &part(&[1, 1, 1, 1])).unwrap(), 0.0);
        assert!(matches!(rand_index(&part(&[1]), &part(&[1])), Err(Error::Undefined(_))));
    }

    #[test]
    fn mutual_information_examples() {
        let u = part(&[1, 1, 2, 2]);
        assert_eq!(mutual_information(&u, &u).unwrap(), 2f64.ln());
        assert_eq!(mutual_information(&u, &part(&[1, 2, 1, 2])).unwrap(), 0.0);
        assert_eq!(mutual_information(&part(&[0; 4]), &part(&[0, 1, 2, 2])).unwrap(), 0.0);
    }

    #[test]
    fn adjusted_examples() {
        let u = part(&[1, 1, 2, 2]);
        let v = part(&[1, 2, 1, 2]);
        assert_eq!(adjusted_rand_index(&u, &u).unwrap().value, 1.0);
        assert_eq!(adjusted_mutual_information(&u, &u).unwrap().value, 1.0);
        assert!((adjusted_rand_index(&u, &v).unwrap().value + 0.5).abs() < 1e-12);
        // index 1, expected 1/3, max 3/2
        let ari = adjusted_rand_index(&part(&[0, 0, 1, 2]), &part(&[0, 0, 1, 1])).unwrap();
        assert!((ari.value - 4.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_convention() {
        let one = part(&[0; 5]);
        let s = adjusted_rand_index(&one, &one).unwrap();
        assert_eq!(s, AdjustedScore { value: 1.0, degenerate: true });
        let s = adjusted_mutual_information(&one, &one).unwrap();
        assert_eq!(s, AdjustedScore { value: 1.0, degenerate: true });
        let singletons = part(&[0, 1, 2, 3, 4]);
        assert_eq!(adjusted_rand_index(&singletons, &singletons).unwrap().value, 1.0);
        assert_eq!(adjusted_rand_index(&one, &singletons).unwrap().value, 0.0);
        // one single-block side and a two-block side: index equals its expectation
        let two = part(&[0, 0, 1, 1, 1]);
        assert_eq!(adjusted_rand_index(&one, &two).unwrap(), AdjustedScore { value: 0.0, degenerate: false });
        assert_eq!(adjusted_mutual_information(&one, &two).unwrap().value, 0.0);
    }

    #[test]
    fn emi_matches_permutation_enumeration() {
        // expectation checked against all 9! relabelings of V
        let u = part(&[0, 0, 0, 1, 1, 1, 2, 2, 2]);
        let v = part(&[0, 0, 1, 1, 1, 2, 2, 2, 2]);
        let t = ContingencyTable::new(&u, &v).unwrap();
        let emi = brute_force_emi(&t);
        let diff = (expected_mutual_information(&t) - emi).abs();
        assert!(diff < 1e-10, "{diff}");
        let mi = mutual_information_of(&t);
        let emi = expected_mutual_information(&t);
        let h = entropy(t.row_sums()).max(entropy(t.col_sums()));
        let ami = adjusted_mutual_information(&u, &v).unwrap().value;
        assert!((ami - (mi - emi) / (h - emi)).abs() < 1e-12);
    }

    /// E[MI] by enumerating every relabeling of V's label vector (m ≤ 9).
    fn brute_force_emi(t: &ContingencyTable) -> f64 {
        let mut u_labels = Vec::new();
        for (i, &a) in t.row_sums().iter().enumerate() {
            u_labels.extend(std::iter::repeat_n(i, a as usize));
        }
        let mut v_labels = Vec::new();
        for (j, &b) in t.col_sums().iter().enumerate() {
            v_labels.extend(std::iter::repeat_n(j, b as usize));
        }
        let m = u_labels.len();
        let mut idx: Vec<usize> = (0..m).collect();
        let (mut total, mut count) = (0.0, 0u64);
        permute(&mut idx, 0, &mut |perm| {
            let shuffled: Vec<usize> = perm.iter().map(|&i| v_labels[i]).collect();
            total += mutual_information(&part(&u_labels), &part(&shuffled)).unwrap();
            count += 1;
        });
        total / count as f64
    }

    fn permute(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == v.len() {
            f(v);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            permute(v, k + 1, f);
            v.swap(k, i);
        }
    }

    #[test]
    fn mmd_examples() {
        let u = part(&[1, 1, 2, 2]);
        assert_eq!(minimal_matching_distance(&u, &part(&[2, 2, 1, 1])).unwrap(), 0);
        assert_eq!(minimal_matching_distance(&u, &part(&[1, 2, 1, 2])).unwrap(), 2);
        assert_eq!(minimal_matching_distance(&u, &u).unwrap(), 0);
        assert_eq!(minimal_matching_distance(&part(&[0, 0, 0]), &part(&[0, 1, 2])).unwrap(), 2);
    }

    #[test]
    fn jaccard_examples() {
        assert_eq!(jaccard(&[1, 2], &[2, 1]), 1.0);
        assert_eq!(jaccard(&[1], &[2]), 0.0);
        assert_eq!(jaccard(&[1, 2, 3], &[2, 3, 4]), 0.5);
        assert_eq!(jaccard(&[], &[]), 1.0);
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("AMI".parse::<ScoreKind>().unwrap(), ScoreKind::Ami);
        assert!("vi".parse::<ScoreKind>().is_err());
        assert!(score(ScoreKind::Jaccard, &part(&[0]), &part(&[0])).is_err());
    }

    fn labels_strategy() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
        (2usize..40).prop_flat_map(|m| {
            (
                prop::collection::vec(0usize..5, m),
                prop::collection::vec(0usize..6, m),
            )
        })
    }

    proptest! {
        #[test]
        fn invariant_under_relabeling_and_symmetric((a, b) in labels_strategy(), s1 in 1usize..50, s2 in 1usize..50) {
            let (u, v) = (part(&a), part(&b));
            let ru = part(&a.iter().map(|l| (l * 13 + s1) % 97).collect::<Vec<_>>());
            let rv = part(&b.iter().map(|l| (l * 17 + s2) % 89).collect::<Vec<_>>());
            for kind in [ScoreKind::Ri, ScoreKind::Ari, ScoreKind::Mi, ScoreKind::Ami, ScoreKind::Mmd] {
                let base = score(kind, &u, &v).unwrap();
                prop_assert!((base - score(kind, &ru, &rv).unwrap()).abs() < 1e-12);
                prop_assert!((base - score(kind, &v, &u).unwrap()).abs() < 1e-9, "{kind} asymmetric");
            }
        }

        #[test]
        fn ranges((a, b) in labels_strategy()) {
            let (u, v) = (part(&a), part(&b));
            let t = ContingencyTable::new(&u, &v).unwrap();
            let mi = mutual_information_of(&t);
            prop_assert!(mi >= -1e-12);
            prop_assert!(mi <= entropy(t.row_sums()).min(entropy(t.col_sums())) + 1e-12);
            let ri = rand_index(&u, &v).unwrap();
            prop_assert!((0.0..=1.0).contains(&ri));
            for kind in [ScoreKind::Ari, ScoreKind::Ami] {
                let s = adjusted(kind, &u, &v).unwrap().value;
                prop_assert!(s <= 1.0 + 1e-12);
                prop_assert_eq!(s == 1.0, u == v, "{} = {} for u={:?} v={:?}", kind, s, a, b);
            }
        }
    }
}
