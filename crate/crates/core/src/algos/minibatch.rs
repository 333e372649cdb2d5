use rand::seq::index::sample;

use super::kmeans::{assign, kmeans_plus_plus, lloyd, KMeansModel};
use super::AlgoConfig;
use crate::data::{squared_euclidean, Dataset};
use crate::error::{Error, Result};
use crate::function::{AlgorithmKind, ClusteringFunction};

pub fn fit_minibatch_kmeans(x: &Dataset, cfg: &AlgoConfig) -> Result<ClusteringFunction> {
    let model = fit_minibatch_kmeans_model(x, cfg)?;
    ClusteringFunction::from_centroids(AlgorithmKind::MiniBatchKMeans, model.centroids, model.p)
}

/// Mini-batch k-means with per-centre learning rates `1 / (points seen)`.
///
/// Each of `cfg.max_iter` steps draws `cfg.batch_size` distinct rows. A batch
/// covering the whole dataset is a full Lloyd step, so `batch_size == n`
/// reproduces [`super::fit_kmeans_model`] for the same seed.
pub fn fit_minibatch_kmeans_model(x: &Dataset, cfg: &AlgoConfig) -> Result<KMeansModel> {
    cfg.validate()?;
    cfg.check_k_le_n(x.n())?;
    if cfg.batch_size > x.n() {
        return Err(Error::Config(format!(
            "batch_size = {} exceeds the number of points n = {}",
            cfg.batch_size,
            x.n()
        )));
    }
    let mut rng = cfg.seed.rng();
    let mut best: Option<KMeansModel> = None;
    for _ in 0..cfg.n_init {
        let init = kmeans_plus_plus(x, cfg.k, &mut rng);
        let run = if cfg.batch_size == x.n() {
            lloyd(x, init, cfg.max_iter, cfg.tol)
        } else {
            stochastic(x, init, cfg, &mut rng)
        };
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.expect("n_init >= 1"))
}

fn stochastic(
    x: &Dataset,
    mut centroids: Vec<f64>,
    cfg: &AlgoConfig,
    rng: &mut crate::rng::StreamRng,
) -> KMeansModel {
    let p = x.p();
    let k = cfg.k;
    let mut seen = vec![0usize; k];
    let mut history = Vec::new();
    let mut iterations_run = 0;
    for _ in 0..cfg.max_iter {
        iterations_run += 1;
        let batch: Vec<usize> = sample(rng, x.n(), cfg.batch_size).into_vec();
        let mut sums = vec![0.0; k * p];
        let mut counts = vec![0usize; k];
        for &i in &batch {
            let row = x.row(i);
            let c = (0..k)
                .map(|c| squared_euclidean(row, &centroids[c * p..(c + 1) * p]))
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (c, d)| if d < acc.1 { (c, d) } else { acc })
                .0;
            counts[c] += 1;
            for (s, v) in sums[c * p..(c + 1) * p].iter_mut().zip(row) {
                *s += v;
            }
        }
        let mut shift: f64 = 0.0;
        for c in 0..k {
            if counts[c] == 0 {
                continue;
            }
            seen[c] += counts[c];
            let rate = 1.0 / seen[c] as f64;
            let mut moved = 0.0;
            for j in 0..p {
                let cur = centroids[c * p + j];
                let step = rate * (sums[c * p + j] - counts[c] as f64 * cur);
                centroids[c * p + j] = cur + step;
                moved += step * step;
            }
            shift = shift.max(moved.sqrt());
        }
        if shift < cfg.tol {
            break;
        }
    }
    let mut labels = vec![0; x.n()];
    let mut d2 = vec![0.0; x.n()];
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
    use crate::algos::fit_kmeans_model;
    use crate::rng::SeededRng;

    fn blobs() -> Dataset {
        let mut rows = Vec::new();
        for (cx, cy) in [(0.0, 0.0), (8.0, 0.0), (0.0, 8.0), (8.0, 8.0)] {
            for i in 0..25 {
                let t = i as f64;
                rows.push([cx + (t * 0.7).sin(), cy + (t * 1.9).cos()]);
            }
        }
        Dataset::from_rows(&rows).unwrap()
    }

    #[test]
    fn full_batch_equals_lloyd() {
        let x = blobs();
        let seed = SeededRng::new(5);
        let mut mb = AlgoConfig::minibatch_kmeans(4, x.n()).with_seed(seed);
        mb.max_iter = 300;
        let km = AlgoConfig::kmeans(4).with_seed(seed);
        let a = fit_minibatch_kmeans_model(&x, &mb).unwrap();
        let b = fit_kmeans_model(&x, &km).unwrap();
        assert_eq!(a.centroids, b.centroids);
        assert_eq!(a.inertia, b.inertia);
    }

    #[test]
    fn single_cluster_approaches_mean() {
        let x = blobs();
        let mut cfg = AlgoConfig::minibatch_kmeans(1, 10).with_seed(SeededRng::new(2));
        cfg.max_iter = 500;
        cfg.tol = 1e-9;
        let m = fit_minibatch_kmeans_model(&x, &cfg).unwrap();
        let means = x.column_means();
        for (a, b) in m.centroid(0).iter().zip(&means) {
            assert!((a - b).abs() < 0.5, "{a} vs {b}");
        }
    }

    #[test]
    fn batch_larger_than_n_rejected() {
        let x = blobs();
        assert!(fit_minibatch_kmeans(&x, &AlgoConfig::minibatch_kmeans(2, 1000)).is_err());
    }
}
