use super::AlgoConfig;
use crate::data::{squared_euclidean, Dataset};
use crate::error::Result;
use crate::function::{AlgorithmKind, ClusteringFunction};
use crate::partition::Partition;

/// Ward agglomeration cut at `cfg.k` clusters, lifted to a function by
/// nearest-neighbour classification over the training points.
pub fn fit_agglomerative(x: &Dataset, cfg: &AlgoConfig) -> Result<ClusteringFunction> {
    cfg.validate()?;
    cfg.check_k_le_n(x.n())?;
    let labels = ward_labels(x, cfg.k);
    ClusteringFunction::nearest_neighbor(AlgorithmKind::AgglomerativeWard, x.clone(), &labels, cfg.metric)
}

/// Condensed upper-triangular distance matrix.
struct Condensed {
    n: usize,
    d: Vec<f64>,
}

impl Condensed {
    fn idx(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        a * self.n - a * (a + 1) / 2 + (b - a - 1)
    }
    fn get(&self, i: usize, j: usize) -> f64 {
        self.d[self.idx(i, j)]
    }
    fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.d[k] = v;
    }
}

/// Compact labels of the Ward partition with `k` blocks.
///
/// Uses the nearest-neighbour-chain algorithm on squared Euclidean distances
/// with the Lance–Williams update
/// `d(k, i∪j) = [(n_i+n_k) d(k,i) + (n_j+n_k) d(k,j) − n_k d(i,j)] / (n_i+n_j+n_k)`.
/// Ward linkage is reducible, so sorting the chain's merges by height gives
/// the same hierarchy as the greedy algorithm.
pub fn ward_labels(x: &Dataset, k: usize) -> Vec<usize> {
    let n = x.n();
    if n == 1 || k >= n {
        return (0..n).collect();
    }
    let mut dist = Condensed {
        n,
        d: Vec::with_capacity(n * (n - 1) / 2),
    };
    for i in 0..n {
        for j in i + 1..n {
            dist.d.push(squared_euclidean(x.row(i), x.row(j)));
        }
    }
    let mut size = vec![1usize; n];
    let mut active = vec![true; n];
    let mut merges: Vec<(usize, usize, f64)> = Vec::with_capacity(n - 1);
    let mut chain: Vec<usize> = Vec::with_capacity(n);

    while merges.len() < n - 1 {
        if chain.is_empty() {
            chain.push(active.iter().position(|&a| a).expect("an active cluster remains"));
        }
        let (a, b, d_ab) = loop {
            let a = *chain.last().unwrap();
            let prev = chain.len().checked_sub(2).map(|i| chain[i]);
            let (mut best, mut best_d) = match prev {
                Some(p) => (p, dist.get(a, p)),
                None => (usize::MAX, f64::INFINITY),
            };
            for j in 0..n {
                if j != a && active[j] {
                    let d = dist.get(a, j);
                    if d < best_d || (d == best_d && Some(best) != prev && j < best) {
                        best = j;
                        best_d = d;
                    }
                }
            }
            if Some(best) == prev {
                chain.pop();
                chain.pop();
                break (a, best, best_d);
            }
            chain.push(best);
        };
        // merged cluster lives on at index `keep`
        let (keep, gone) = if a < b { (a, b) } else { (b, a) };
        let (na, nb) = (size[keep] as f64, size[gone] as f64);
        for j in 0..n {
            if !active[j] || j == keep || j == gone {
                continue;
            }
            let nk = size[j] as f64;
            let updated = ((na + nk) * dist.get(j, keep) + (nb + nk) * dist.get(j, gone)
                - nk * d_ab)
                / (na + nb + nk);
            dist.set(j, keep, updated);
        }
        active[gone] = false;
        size[keep] += size[gone];
        merges.push((keep, gone, d_ab));
    }

    merges.sort_by(|x, y| x.2.total_cmp(&y.2));
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for &(a, b, _) in merges.iter().take(n - k) {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    Partition::from_labels(&roots)
        .expect("n >= 1")
        .labels()
        .to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Greedy O(n³) Ward: merge the pair with the smallest increase in
    /// within-cluster sum of squares, computed from scratch each step.
    fn naive_ward(x: &Dataset, k: usize) -> Vec<usize> {
        let mut clusters: Vec<Vec<usize>> = (0..x.n()).map(|i| vec![i]).collect();
        let sse = |members: &[usize]| {
            let p = x.p();
            let mut mean = vec![0.0; p];
            for &i in members {
                for (m, v) in mean.iter_mut().zip(x.row(i)) {
                    *m += v / members.len() as f64;
                }
            }
            members.iter().map(|&i| squared_euclidean(x.row(i), &mean)).sum::<f64>()
        };
        while clusters.len() > k {
            let mut best = (0, 1, f64::INFINITY);
            for a in 0..clusters.len() {
                for b in a + 1..clusters.len() {
                    let mut u = clusters[a].clone();
                    u.extend(&clusters[b]);
                    let cost = sse(&u) - sse(&clusters[a]) - sse(&clusters[b]);
                    if cost < best.2 {
                        best = (a, b, cost);
                    }
                }
            }
            let moved = clusters.remove(best.1);
            clusters[best.0].extend(moved);
        }
        let mut labels = vec![0; x.n()];
        for (c, members) in clusters.iter().enumerate() {
            for &i in members {
                labels[i] = c;
            }
        }
        Partition::from_labels(&labels).unwrap().labels().to_vec()
    }

    #[test]
    fn two_points_two_clusters() {
        let x = Dataset::from_rows(&[[0.0], [1.0]]).unwrap();
        assert_eq!(ward_labels(&x, 2), vec![0, 1]);
        assert_eq!(ward_labels(&x, 1), vec![0, 0]);
    }

    #[test]
    fn far_blobs_recovered_and_induced_prediction() {
        let mut rows = Vec::new();
        for c in [0.0, 100.0] {
            for i in 0..10 {
                rows.push([c + (i % 4) as f64 * 0.5, c + (i / 4) as f64 * 0.5]);
            }
        }
        let x = Dataset::from_rows(&rows).unwrap();
        let labels = ward_labels(&x, 2);
        assert_eq!(labels, [vec![0; 10], vec![1; 10]].concat());
        let f = fit_agglomerative(&x, &AlgoConfig::agglomerative_ward(2)).unwrap();
        assert_eq!(f.predict(&[99.0, 99.0]).unwrap(), 1);
        assert_eq!(f.k(), 2);
    }

    #[test]
    fn matches_greedy_ward_on_irregular_data() {
        let rows: Vec<[f64; 2]> = (0..24)
            .map(|i| {
                let t = i as f64;
                [(t * 1.7).sin() * 4.0 + (i % 3) as f64 * 6.0, (t * 0.9).cos() * 3.0 + t * 0.1]
            })
            .collect();
        let x = Dataset::from_rows(&rows).unwrap();
        for k in 1..8 {
            assert_eq!(ward_labels(&x, k), naive_ward(&x, k), "k = {k}");
        }
    }
}
