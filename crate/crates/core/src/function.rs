//! Learned clustering functions and the partitions they induce.

use serde::{Deserialize, Serialize};

use crate::data::{squared_euclidean, Dataset};
use crate::error::{Error, Result};
use crate::partition::Partition;

/// Distance used by nearest-neighbour induced functions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMetric {
    #[default]
    Euclidean,
    Manhattan,
}

impl DistanceMetric {
    /// A value monotone in the metric; cheaper than the metric itself for Euclidean.
    #[inline]
    pub(crate) fn rank_distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            DistanceMetric::Euclidean => squared_euclidean(a, b),
            DistanceMetric::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        }
    }

    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            DistanceMetric::Euclidean => squared_euclidean(a, b).sqrt(),
            DistanceMetric::Manhattan => self.rank_distance(a, b),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmKind {
    #[serde(rename = "kmeans")]
    KMeans,
    #[serde(rename = "minibatch_kmeans")]
    MiniBatchKMeans,
    AgglomerativeWard,
    Dbscan,
}

impl AlgorithmKind {
    pub fn name(self) -> &'static str {
        match self {
            AlgorithmKind::KMeans => "kmeans",
            AlgorithmKind::MiniBatchKMeans => "minibatch_kmeans",
            AlgorithmKind::AgglomerativeWard => "agglomerative_ward",
            AlgorithmKind::Dbscan => "dbscan",
        }
    }
}

#[derive(Clone, Debug)]
enum Model {
    /// Row-major `k × p` centroids; prediction is the nearest centroid.
    Centroids(Vec<f64>),
    /// Labelled reference points; prediction copies the label of the nearest one.
    NearestNeighbor {
        points: Dataset,
        labels: Vec<usize>,
        metric: DistanceMetric,
    },
}

/// A trained model mapping any `p`-vector to a label in `0..k`.
///
/// Prediction is deterministic; ties between equidistant centroids or
/// reference points go to the lowest cluster / row index.
#[derive(Clone, Debug)]
pub struct ClusteringFunction {
    kind: AlgorithmKind,
    model: Model,
    k: usize,
    p: usize,
    all_noise: bool,
}

impl ClusteringFunction {
    /// Nearest-centroid function over row-major `centroids` of dimension `p`.
    pub fn from_centroids(kind: AlgorithmKind, centroids: Vec<f64>, p: usize) -> Result<Self> {
        if p == 0 || centroids.is_empty() || !centroids.len().is_multiple_of(p) {
            return Err(Error::Config(format!(
                "centroid buffer of length {} is not a non-empty multiple of p = {p}",
                centroids.len()
            )));
        }
        let k = centroids.len() / p;
        Ok(Self {
            kind,
            model: Model::Centroids(centroids),
            k,
            p,
            all_noise: false,
        })
    }

    /// Function induced from a labelled training set by nearest-neighbour
    /// classification. Labels are compacted to `0..k`.
    pub fn nearest_neighbor(
        kind: AlgorithmKind,
        points: Dataset,
        labels: &[usize],
        metric: DistanceMetric,
    ) -> Result<Self> {
        if labels.len() != points.n() {
            return Err(Error::Dimension {
                context: "induced function labels",
                expected: points.n(),
                found: labels.len(),
            });
        }
        let partition = Partition::from_labels(labels)?;
        let p = points.p();
        Ok(Self {
            kind,
            k: partition.k(),
            model: Model::NearestNeighbor {
                points,
                labels: partition.labels().to_vec(),
                metric,
            },
            p,
            all_noise: false,
        })
    }

    pub(crate) fn flag_all_noise(mut self) -> Self {
        self.all_noise = true;
        self
    }

    pub fn kind(&self) -> AlgorithmKind {
        self.kind
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Set by DBSCAN when every training point was noise.
    pub fn all_noise(&self) -> bool {
        self.all_noise
    }

    pub fn centroids(&self) -> Option<Vec<&[f64]>> {
        match &self.model {
            Model::Centroids(c) => Some(c.chunks_exact(self.p).collect()),
            Model::NearestNeighbor { .. } => None,
        }
    }

    pub fn predict(&self, y: &[f64]) -> Result<usize> {
        if y.len() != self.p {
            return Err(Error::Dimension {
                context: "prediction input",
                expected: self.p,
                found: y.len(),
            });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("prediction input has non-finite entries".into()));
        }
        Ok(self.predict_unchecked(y))
    }

    #[inline]
    pub(crate) fn predict_unchecked(&self, y: &[f64]) -> usize {
        match &self.model {
            Model::Centroids(c) => nearest_row(c.chunks_exact(self.p), y, squared_euclidean),
            Model::NearestNeighbor {
                points,
                labels,
                metric,
            } => labels[nearest_row(points.rows(), y, |a, b| metric.rank_distance(a, b))],
        }
    }

    /// Raw predicted labels for every row of `x` (not compacted).
    pub fn labels_of(&self, x: &Dataset) -> Result<Vec<usize>> {
        x.check_dim(self.p, "dataset to label")?;
        Ok(x.rows().map(|r| self.predict_unchecked(r)).collect())
    }

    /// `Ψ(X)`: the partition of `x` induced by this function.
    pub fn partition_of(&self, x: &Dataset) -> Result<Partition> {
        Partition::from_labels(&self.labels_of(x)?)
    }
}

/// Index of the row nearest to `y`; lowest index wins ties.
#[inline]
fn nearest_row<'a>(
    rows: impl Iterator<Item = &'a [f64]>,
    y: &[f64],
    dist: impl Fn(&[f64], &[f64]) -> f64,
) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, r) in rows.enumerate() {
        let d = dist(r, y);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

pub fn predict(f: &ClusteringFunction, y: &[f64]) -> Result<usize> {
    f.predict(y)
}

pub fn partition_of(f: &ClusteringFunction, x: &Dataset) -> Result<Partition> {
    f.partition_of(x)
}

/// The co-clustering operator: indicator that a query shares the anchor's label.
#[derive(Clone, Debug)]
pub struct BinaryCoClustering<'a> {
    anchor: Vec<f64>,
    anchor_label: usize,
    underlying: &'a ClusteringFunction,
}

impl<'a> BinaryCoClustering<'a> {
    pub fn new(underlying: &'a ClusteringFunction, anchor: &[f64]) -> Result<Self> {
        let anchor_label = underlying.predict(anchor)?;
        Ok(Self {
            anchor: anchor.to_vec(),
            anchor_label,
            underlying,
        })
    }

    pub fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    pub fn evaluate(&self, y: &[f64]) -> Result<bool> {
        Ok(self.underlying.predict(y)? == self.anchor_label)
    }

    /// Membership indicator over the rows of `x`.
    pub fn indicator(&self, x: &Dataset) -> Result<Vec<bool>> {
        Ok(self
            .underlying
            .labels_of(x)?
            .into_iter()
            .map(|l| l == self.anchor_label)
            .collect())
    }
}

/// `Ψ̃_x(X)`: split `x_data` by agreement with the label of `anchor`.
///
/// The result has one block when every point agrees (or none does), two otherwise.
pub fn binary_partition(
    f: &ClusteringFunction,
    anchor: &[f64],
    x_data: &Dataset,
) -> Result<Partition> {
    let op = BinaryCoClustering::new(f, anchor)?;
    Partition::from_indicator(&op.indicator(x_data)?)
}
