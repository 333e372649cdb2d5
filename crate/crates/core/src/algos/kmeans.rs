use rand::Rng;

use super::AlgoConfig;
use crate::data::{squared_euclidean, Dataset};
use crate::error::Result;
use crate::function::{AlgorithmKind, ClusteringFunction};
use crate::rng::StreamRng;

/// Result of a k-means fit.
///
/// `inertia` is the squared-Euclidean objective `Σ_i ‖x_i − c_{z(i)}‖²`.
#[derive(Clone, Debug)]
pub struct KMeansModel {
    /// Row-major `k × p`.
    pub centroids: Vec<f64>,
    pub p: usize,
    pub labels: Vec<usize>,
    pub inertia: f64,
    pub iterations_run: usize,
    /// Objective after each assignment step of the kept run.
    pub inertia_history: Vec<f64>,
}

impl KMeansModel {
    pub fn k(&self) -> usize {
        self.centroids.len() / self.p
    }

    pub fn centroid(&self, c: usize) -> &[f64] {
        &self.centroids[c * self.p..(c + 1) * self.p]
    }

    /// The objective with unsquared distances, `Σ_i ‖x_i − c_{z(i)}‖`.
    pub fn unsquared_objective(&self, x: &Dataset) -> f64 {
        x.rows()
            .zip(&self.labels)
            .map(|(r, &l)| squared_euclidean(r, self.centroid(l)).sqrt())
            .sum()
    }
}

pub fn fit_kmeans(x: &Dataset, cfg: &AlgoConfig) -> Result<ClusteringFunction> {
    let model = fit_kmeans_model(x, cfg)?;
    ClusteringFunction::from_centroids(AlgorithmKind::KMeans, model.centroids, model.p)
}

/// Lloyd iterations from `cfg.n_init` k-means++ starts; keeps the lowest inertia.
pub fn fit_kmeans_model(x: &Dataset, cfg: &AlgoConfig) -> Result<KMeansModel> {
    cfg.validate()?;
    cfg.check_k_le_n(x.n())?;
    let mut rng = cfg.seed.rng();
    let mut best: Option<KMeansModel> = None;
    for _ in 0..cfg.n_init {
        let init = kmeans_plus_plus(x, cfg.k, &mut rng);
        let run = lloyd(x, init, cfg.max_iter, cfg.tol);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.expect("n_init >= 1"))
}

/// D²-weighted seeding. Falls back to uniform picks when every remaining
/// point coincides with a chosen centre.
pub(crate) fn kmeans_plus_plus(x: &Dataset, k: usize, rng: &mut StreamRng) -> Vec<f64> {
    let n = x.n();
    let mut centroids = Vec::with_capacity(k * x.p());
    let first = rng.random_range(0..n);
    centroids.extend_from_slice(x.row(first));
    let mut d2: Vec<f64> = x.rows().map(|r| squared_euclidean(r, x.row(first))).collect();
    for _ in 1..k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            for (i, &d) in d2.iter().enumerate() {
                acc += d;
                if d > 0.0 && acc > target {
                    chosen = Some(i);
                    break;
                }
            }
            chosen.unwrap_or_else(|| d2.iter().rposition(|&d| d > 0.0).unwrap_or(0))
        } else {
            rng.random_range(0..n)
        };
        let c = x.row(pick);
        centroids.extend_from_slice(c);
        for (d, r) in d2.iter_mut().zip(x.rows()) {
            *d = d.min(squared_euclidean(r, c));
        }
    }
    centroids
}

/// Nearest centroid per row and its squared distance.
pub(crate) fn assign(x: &Dataset, centroids: &[f64], labels: &mut [usize], d2: &mut [f64]) {
    let p = x.p();
    for ((row, l), d) in x.rows().zip(labels.iter_mut()).zip(d2.iter_mut()) {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (c, cent) in centroids.chunks_exact(p).enumerate() {
            let dist = squared_euclidean(row, cent);
            if dist < best_d {
                best_d = dist;
                best = c;
            }
        }
        *l = best;
        *d = best_d;
    }
}

/// Moves the centroid of every empty cluster onto the point farthest from its
/// own centroid, taking that point away from a cluster that keeps ≥ 1 member.
fn repair_empty(
    x: &Dataset,
    centroids: &mut [f64],
    labels: &mut [usize],
    d2: &mut [f64],
    counts: &mut [usize],
) {
    let p = x.p();
    for c in 0..counts.len() {
        if counts[c] > 0 {
            continue;
        }
        let mut far = None;
        let mut far_d = -1.0;
        for (i, &d) in d2.iter().enumerate() {
            if counts[labels[i]] > 1 && d > far_d {
                far_d = d;
                far = Some(i);
            }
        }
        let Some(i) = far else { continue };
        counts[labels[i]] -= 1;
        labels[i] = c;
        counts[c] = 1;
        d2[i] = 0.0;
        centroids[c * p..(c + 1) * p].copy_from_slice(x.row(i));
    }
}

fn update_means(x: &Dataset, labels: &[usize], counts: &[usize], centroids: &mut [f64]) {
    let p = x.p();
    let mut sums = vec![0.0; centroids.len()];
    for (row, &l) in x.rows().zip(labels) {
        for (s, v) in sums[l * p..(l + 1) * p].iter_mut().zip(row) {
            *s += v;
        }
    }
    for (c, &cnt) in counts.iter().enumerate() {
        if cnt > 0 {
            for j in 0..p {
                centroids[c * p + j] = sums[c * p + j] / cnt as f64;
            }
        }
    }
}

/// Plain Lloyd iterations starting from `centroids`.
pub(crate) fn lloyd(x: &Dataset, mut centroids: Vec<f64>, max_iter: usize, tol: f64) -> KMeansModel {
    let p = x.p();
    let k = centroids.len() / p;
    let n = x.n();
    let mut labels = vec![0; n];
    let mut d2 = vec![0.0; n];
    let mut history = Vec::new();
    let mut iterations_run = 0;
    for _ in 0..max_iter {
        iterations_run += 1;
        assign(x, &centroids, &mut labels, &mut d2);
        history.push(d2.iter().sum::<f64>());
        let mut counts = vec![0usize; k];
        for &l in &labels {
            counts[l] += 1;
        }
        repair_empty(x, &mut centroids, &mut labels, &mut d2, &mut counts);
        let old = centroids.clone();
        update_means(x, &labels, &counts, &mut centroids);
        let shift = old
            .chunks_exact(p)
            .zip(centroids.chunks_exact(p))
            .map(|(a, b)| squared_euclidean(a, b))
            .fold(0.0, f64::max)
            .sqrt();
        if shift < tol {
            break;
        }
    }
    assign(x, &centroids, &mut labels, &mut d2);
    let inertia = d2.iter().sum();
    history.push(inertia);
    KMeansModel {
        centroids,
        p,
        labels,
        inertia,
        iterations_run,
        inertia_history: history,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    fn square() -> Dataset {
        Dataset::from_rows(&[[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]]).unwrap()
    }

    /// Exhaustive minimum of the squared objective over all 2-partitions.
    fn brute_force_two_means(x: &Dataset) -> f64 {
        let n = x.n();
        let mut best = f64::INFINITY;
        for mask in 1u32..(1 << n) - 1 {
            let mut cost = 0.0;
            for side in [true, false] {
                let members: Vec<usize> = (0..n).filter(|&i| (mask >> i & 1 == 1) == side).collect();
                let mut mean = vec![0.0; x.p()];
                for &i in &members {
                    for (m, v) in mean.iter_mut().zip(x.row(i)) {
                        *m += v / members.len() as f64;
                    }
                }
                cost += members.iter().map(|&i| squared_euclidean(x.row(i), &mean)).sum::<f64>();
            }
            best = best.min(cost);
        }
        best
    }

    #[test]
    fn square_instance_matches_enumeration() {
        let x = square();
        let oracle = brute_force_two_means(&x);
        assert_eq!(oracle, 1.0);
        let m = fit_kmeans_model(&x, &AlgoConfig::kmeans(2).with_seed(SeededRng::new(3))).unwrap();
        assert!((m.inertia - oracle).abs() < 1e-12);
        let mut cents: Vec<Vec<f64>> = (0..2).map(|c| m.centroid(c).to_vec()).collect();
        cents.sort_by(|a, b| a[0].total_cmp(&b[0]));
        assert_eq!(cents, vec![vec![0.0, 0.5], vec![10.0, 0.5]]);
        assert!((m.unsquared_objective(&x) - 2.0).abs() < 1e-12);
        let f = fit_kmeans(&x, &AlgoConfig::kmeans(2)).unwrap();
        let part = f.partition_of(&x).unwrap();
        assert_eq!(part.labels(), &[0, 0, 1, 1]);
    }

    #[test]
    fn one_cluster_is_column_mean() {
        let x = Dataset::from_rows(&[[1.0, 2.0], [3.0, 6.0], [5.0, 1.0]]).unwrap();
        let m = fit_kmeans_model(&x, &AlgoConfig::kmeans(1)).unwrap();
        let means = x.column_means();
        for (a, b) in m.centroid(0).iter().zip(&means) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn k_equals_n_has_zero_inertia() {
        let x = Dataset::from_rows(&[[1.0], [4.0], [9.0], [-3.0]]).unwrap();
        let m = fit_kmeans_model(&x, &AlgoConfig::kmeans(4)).unwrap();
        assert_eq!(m.inertia, 0.0);
    }

    #[test]
    fn duplicates_with_k_equal_distinct_count() {
        let x = Dataset::from_rows(&[[1.0], [1.0], [1.0], [5.0]]).unwrap();
        let m = fit_kmeans_model(&x, &AlgoConfig::kmeans(3)).unwrap();
        assert_eq!(m.k(), 3);
        assert_eq!(m.inertia, 0.0);
    }

    #[test]
    fn inertia_monotone_and_centroids_are_means() {
        let rows: Vec<[f64; 2]> = (0..200)
            .map(|i| {
                let t = i as f64;
                [(t * 0.37).sin() * 5.0 + (i % 3) as f64 * 4.0, (t * 1.3).cos() * 3.0]
            })
            .collect();
        let x = Dataset::from_rows(&rows).unwrap();
        for seed in 0..5 {
            let m = fit_kmeans_model(&x, &AlgoConfig::kmeans(6).with_seed(SeededRng::new(seed)).with_n_init(1))
                .unwrap();
            for w in m.inertia_history.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-12), "{:?}", m.inertia_history);
            }
            let blocks: Vec<Vec<usize>> = (0..m.k())
                .map(|c| (0..x.n()).filter(|&i| m.labels[i] == c).collect())
                .collect();
            for (c, b) in blocks.iter().enumerate() {
                assert!(!b.is_empty());
                for j in 0..2 {
                    let mean = b.iter().map(|&i| x.row(i)[j]).sum::<f64>() / b.len() as f64;
                    assert!((mean - m.centroid(c)[j]).abs() < 1e-3);
                }
            }
        }
    }

    #[test]
    fn seeded_fits_are_reproducible() {
        let x = Dataset::from_rows(&(0..50).map(|i| [(i * i % 17) as f64, (i % 7) as f64]).collect::<Vec<_>>())
            .unwrap();
        let cfg = AlgoConfig::kmeans(4).with_seed(SeededRng::new(11));
        let a = fit_kmeans_model(&x, &cfg).unwrap();
        let b = fit_kmeans_model(&x, &cfg).unwrap();
        assert_eq!(a.centroids, b.centroids);
        assert_eq!(a.labels, b.labels);
    }
}
