use rand::seq::index::sample as sample_indices;

use super::{average_clusters, run_perturbed, ClusterScore, PerturbSpec};
use crate::algos::AlgoConfig;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::metrics::{minimal_matching_distance, ContingencyTable};
use crate::partition::Partition;
use crate::rng::{Role, SeededRng};

/// Original clustering of `x`: raw labels of the fitted function and its `k`.
fn base_labels(a: &AlgoConfig, x: &Dataset) -> Result<(Vec<usize>, usize)> {
    let f = a.fit(x)?;
    Ok((f.labels_of(x)?, f.k()))
}

fn block_sizes(labels: &[usize], k: usize) -> Vec<usize> {
    let mut sizes = vec![0; k];
    for &l in labels {
        sizes[l] += 1;
    }
    sizes
}

/// Counts `n_ji` of original cluster `j` (looked up through `present`)
/// against perturbed cluster `i`.
fn overlap(base: &[usize], k: usize, present: &[usize], perturbed: &[usize], kp: usize) -> ContingencyTable {
    let restricted: Vec<usize> = present.iter().map(|&o| base[o]).collect();
    ContingencyTable::from_label_slices(&restricted, k, perturbed, kp)
}

/// Per original cluster, the best Jaccard coefficient against any perturbed
/// cluster. Only points present in the perturbed data (`present[r]` is the
/// original index of perturbed row `r`) enter either set. Clusters with no
/// present point are undefined.
pub fn jaccard_per_cluster(
    base: &[usize],
    k: usize,
    present: &[usize],
    perturbed: &[usize],
    kp: usize,
) -> Vec<Option<f64>> {
    let t = overlap(base, k, present, perturbed, kp);
    (0..k)
        .map(|j| {
            let a = t.row_sums()[j];
            (a > 0).then(|| {
                (0..kp)
                    .map(|i| {
                        let inter = t.get(j, i);
                        inter as f64 / (a + t.col_sums()[i] - inter) as f64
                    })
                    .fold(0.0, f64::max)
            })
        })
        .collect()
}

/// Per original cluster, the fraction of its pairs still clustered together.
/// Clusters with fewer than two present points are undefined.
pub fn r_per_cluster(
    base: &[usize],
    k: usize,
    present: &[usize],
    perturbed: &[usize],
    kp: usize,
) -> Vec<Option<f64>> {
    let t = overlap(base, k, present, perturbed, kp);
    let c2 = |c: u64| (c * c.saturating_sub(1) / 2) as f64;
    (0..k)
        .map(|j| {
            let a = t.row_sums()[j];
            (a >= 2).then(|| t.row(j).iter().map(|&c| c2(c)).sum::<f64>() / c2(a))
        })
        .collect()
}

/// Per original cluster `U_j`, the symmetric difference with the perturbed
/// cluster of largest overlap (lowest index on ties), optionally divided by
/// `|U_j|`. Clusters with fewer than two present points are undefined.
pub fn d_per_cluster(
    base: &[usize],
    k: usize,
    present: &[usize],
    perturbed: &[usize],
    kp: usize,
    relative: bool,
) -> Vec<Option<f64>> {
    let t = overlap(base, k, present, perturbed, kp);
    (0..k)
        .map(|j| {
            let a = t.row_sums()[j];
            (a >= 2).then(|| {
                let mut best = 0;
                for i in 1..kp {
                    if t.get(j, i) > t.get(j, best) {
                        best = i;
                    }
                }
                let inter = t.get(j, best);
                let d = (a - inter + t.col_sums()[best] - inter) as f64;
                if relative {
                    d / a as f64
                } else {
                    d
                }
            })
        })
        .collect()
}

/// Average minimal matching distance between the original partition of `x`
/// and the partitions of `x` induced by functions fit on perturbed copies.
pub fn stability_mmd(a: &AlgoConfig, x: &Dataset, spec: &PerturbSpec) -> Result<f64> {
    let (base, _) = base_labels(a, x)?;
    let base = Partition::from_labels(&base)?;
    let runs = run_perturbed(a, x, spec, |_, data| {
        let f = a.fit(data)?;
        minimal_matching_distance(&base, &f.partition_of(x)?)
    })?;
    Ok(runs.iter().sum::<usize>() as f64 / runs.len() as f64)
}

/// Perturbed training partitions: `(present indices, labels, k)` per iteration.
fn perturbed_partitions(
    a: &AlgoConfig,
    x: &Dataset,
    spec: &PerturbSpec,
) -> Result<Vec<(Vec<usize>, Vec<usize>, usize)>> {
    run_perturbed(a, x, spec, |idx, data| {
        let f = a.fit(data)?;
        Ok((idx.to_vec(), f.labels_of(data)?, f.k()))
    })
}

fn per_cluster_stability(
    a: &AlgoConfig,
    x: &Dataset,
    spec: &PerturbSpec,
    score: impl Fn(&[usize], usize, &[usize], &[usize], usize) -> Vec<Option<f64>>,
) -> Result<Vec<ClusterScore>> {
    let (base, k) = base_labels(a, x)?;
    let runs: Vec<Vec<Option<f64>>> = perturbed_partitions(a, x, spec)?
        .iter()
        .map(|(idx, labels, kp)| score(&base, k, idx, labels, *kp))
        .collect();
    Ok(average_clusters(&block_sizes(&base, k), &runs))
}

/// Per-cluster Jaccard stability averaged over perturbations.
pub fn hennig_jaccard(a: &AlgoConfig, x: &Dataset, spec: &PerturbSpec) -> Result<Vec<ClusterScore>> {
    per_cluster_stability(a, x, spec, jaccard_per_cluster)
}

/// Per-cluster fraction of preserved pairs averaged over perturbations.
pub fn mcshane_r_index(a: &AlgoConfig, x: &Dataset, spec: &PerturbSpec) -> Result<Vec<ClusterScore>> {
    per_cluster_stability(a, x, spec, r_per_cluster)
}

/// Per-cluster membership discrepancies averaged over perturbations.
pub fn mcshane_d_index(
    a: &AlgoConfig,
    x: &Dataset,
    spec: &PerturbSpec,
    relative: bool,
) -> Result<Vec<ClusterScore>> {
    per_cluster_stability(a, x, spec, |b, k, p, l, kp| d_per_cluster(b, k, p, l, kp, relative))
}

/// Per original cluster, the fraction of `iterations` feature-subsampled
/// reclusterings (keeping `floor(alpha·p)` features, same `k`) in which the
/// whole cluster lands inside a single new cluster.
pub fn smolkin_ghosh(
    a: &AlgoConfig,
    x: &Dataset,
    alpha: f64,
    iterations: usize,
    seed: SeededRng,
    execution: Execution,
) -> Result<Vec<ClusterScore>> {
    let q = (alpha * x.p() as f64).floor() as usize;
    if !(alpha <= 1.0 && q >= 1) {
        return Err(Error::Config(format!(
            "alpha = {alpha} must satisfy 1 <= floor(alpha * p) and alpha <= 1 (p = {})",
            x.p()
        )));
    }
    if iterations == 0 {
        return Err(Error::Config("iterations must be at least 1".into()));
    }
    let (base, k) = base_labels(a, x)?;
    let runs = map_indexed(iterations, execution, |b| {
        let mut rng = seed.derive(Role::FeatureSubset, b as u64).rng();
        let mut cols = sample_indices(&mut rng, x.p(), q).into_vec();
        cols.sort_unstable();
        let sub = x.select_columns(&cols)?;
        let f = a.fit(&sub)?;
        let labels = f.labels_of(&sub)?;
        let mut first: Vec<Option<usize>> = vec![None; k];
        let mut contained = vec![true; k];
        for (&j, &l) in base.iter().zip(&labels) {
            match first[j] {
                None => first[j] = Some(l),
                Some(l0) if l0 != l => contained[j] = false,
                _ => {}
            }
        }
        Ok((0..k)
            .map(|j| first[j].map(|_| if contained[j] { 1.0 } else { 0.0 }))
            .collect::<Vec<_>>())
    })?;
    Ok(average_clusters(&block_sizes(&base, k), &runs))
}
