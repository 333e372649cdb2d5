use serde::Serialize;

use super::{nearest_neighbors, ClusterScore};
use crate::algos::AlgoConfig;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::function::ClusteringFunction;
use crate::metrics::ContingencyTable;
use crate::partition::Partition;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictionStrength {
    /// Minimum over test clusters with at least two points.
    pub value: f64,
    pub per_cluster: Vec<ClusterScore>,
    /// Test clusters left out because they hold a single point.
    pub excluded: usize,
}

/// Prediction strength of `k` clusters: fit on both sets, then for each
/// test cluster the fraction of its ordered point pairs that the training
/// function also puts together.
pub fn prediction_strength(a: &AlgoConfig, xtr: &Dataset, xte: &Dataset, k: usize) -> Result<PredictionStrength> {
    let cfg = a.clone().with_k(k);
    let f_tr = cfg.fit(xtr)?;
    let f_te = cfg.fit(xte)?;
    prediction_strength_of(&f_tr, &f_te, xte)
}

/// Prediction strength for already fitted functions.
pub fn prediction_strength_of(
    f_train: &ClusteringFunction,
    f_test: &ClusteringFunction,
    xte: &Dataset,
) -> Result<PredictionStrength> {
    let test = f_test.labels_of(xte)?;
    let train = f_train.labels_of(xte)?;
    let t = ContingencyTable::from_label_slices(&test, f_test.k(), &train, f_train.k());
    let mut excluded = 0;
    let per_cluster: Vec<ClusterScore> = (0..f_test.k())
        .map(|j| {
            let m = t.row_sums()[j];
            if m == 1 {
                excluded += 1;
            }
            let value = (m >= 2).then(|| {
                let same: u64 = t.row(j).iter().map(|&c| c * c.saturating_sub(1)).sum();
                same as f64 / (m * (m - 1)) as f64
            });
            ClusterScore {
                cluster: j,
                size: m as usize,
                value,
            }
        })
        .collect();
    if excluded > 0 {
        log::warn!("prediction strength: {excluded} singleton test cluster(s) excluded");
    }
    let value = per_cluster
        .iter()
        .filter_map(|c| c.value)
        .fold(f64::INFINITY, f64::min);
    if value.is_infinite() {
        return Err(Error::Undefined("no test cluster has two or more points".into()));
    }
    Ok(PredictionStrength {
        value,
        per_cluster,
        excluded,
    })
}

/// In-group proportion: per block of `partition`, the fraction of its points
/// whose nearest other point lies in the same block.
pub fn igp(x: &Dataset, partition: &Partition) -> Result<Vec<f64>> {
    if partition.m() != x.n() {
        return Err(Error::Dimension {
            context: "partition length",
            expected: x.n(),
            found: partition.m(),
        });
    }
    let nn = nearest_neighbors(x)?;
    let labels = partition.labels();
    let mut hits = vec![0usize; partition.k()];
    for (i, &(j, _)) in nn.iter().enumerate() {
        if labels[i] == labels[j] {
            hits[labels[i]] += 1;
        }
    }
    Ok(hits
        .iter()
        .zip(partition.block_sizes())
        .map(|(&h, s)| h as f64 / s as f64)
        .collect())
}
