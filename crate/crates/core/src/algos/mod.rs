//! Clustering algorithms producing [`ClusteringFunction`]s.
//!
//! k-means and mini-batch k-means predict with the nearest centroid.
//! Ward agglomeration and DBSCAN only partition their training set; their
//! functions are induced by nearest-neighbour classification over the
//! labelled training points.

mod dbscan;
mod kmeans;
mod minibatch;
mod ward;

use serde::{Deserialize, Serialize};

pub use dbscan::{dbscan_labels, fit_dbscan, DbscanLabels};
pub use kmeans::{fit_kmeans, fit_kmeans_model, KMeansModel};
pub use minibatch::{fit_minibatch_kmeans, fit_minibatch_kmeans_model};
pub use ward::{fit_agglomerative, ward_labels};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::function::{AlgorithmKind, ClusteringFunction, DistanceMetric};
use crate::rng::SeededRng;

/// Algorithm choice plus every tuning knob any of them uses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlgoConfig {
    pub algorithm: AlgorithmKind,
    /// Target number of clusters (ignored by DBSCAN).
    pub k: usize,
    pub max_iter: usize,
    /// Convergence threshold on the largest centroid move.
    pub tol: f64,
    /// Independent k-means++ restarts; the lowest-inertia run is kept.
    pub n_init: usize,
    pub batch_size: usize,
    pub eps: f64,
    pub min_pts: usize,
    pub metric: DistanceMetric,
    pub seed: SeededRng,
}

impl Default for AlgoConfig {
    fn default() -> Self {
        Self {
            algorithm: AlgorithmKind::KMeans,
            k: 2,
            max_iter: 300,
            tol: 1e-4,
            n_init: 3,
            batch_size: 256,
            eps: 0.5,
            min_pts: 5,
            metric: DistanceMetric::Euclidean,
            seed: SeededRng::default(),
        }
    }
}

impl AlgoConfig {
    pub fn kmeans(k: usize) -> Self {
        Self {
            k,
            ..Self::default()
        }
    }

    pub fn minibatch_kmeans(k: usize, batch_size: usize) -> Self {
        Self {
            algorithm: AlgorithmKind::MiniBatchKMeans,
            k,
            batch_size,
            max_iter: 100,
            ..Self::default()
        }
    }

    pub fn agglomerative_ward(k: usize) -> Self {
        Self {
            algorithm: AlgorithmKind::AgglomerativeWard,
            k,
            ..Self::default()
        }
    }

    pub fn dbscan(eps: f64, min_pts: usize) -> Self {
        Self {
            algorithm: AlgorithmKind::Dbscan,
            eps,
            min_pts,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: SeededRng) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_n_init(mut self, n_init: usize) -> Self {
        self.n_init = n_init;
        self
    }

    /// Short label such as `kmeans(k=3)` for reports.
    pub fn label(&self) -> String {
        match self.algorithm {
            AlgorithmKind::Dbscan => format!("dbscan(eps={},min_pts={})", self.eps, self.min_pts),
            other => format!("{}(k={})", other.name(), self.k),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let uses_k = self.algorithm != AlgorithmKind::Dbscan;
        if uses_k && self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config("tol must be positive".into()));
        }
        if self.n_init == 0 {
            return Err(Error::Config("n_init must be at least 1".into()));
        }
        match self.algorithm {
            AlgorithmKind::MiniBatchKMeans if self.batch_size == 0 => {
                Err(Error::Config("batch_size must be at least 1".into()))
            }
            AlgorithmKind::Dbscan if !(self.eps > 0.0 && self.eps.is_finite()) => {
                Err(Error::Config("eps must be positive".into()))
            }
            AlgorithmKind::Dbscan if self.min_pts == 0 => {
                Err(Error::Config("min_pts must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }

    pub(crate) fn check_k_le_n(&self, n: usize) -> Result<()> {
        if self.k > n {
            return Err(Error::Config(format!(
                "k = {} exceeds the number of points n = {n}",
                self.k
            )));
        }
        Ok(())
    }

    /// Trains the configured algorithm on `x`.
    pub fn fit(&self, x: &Dataset) -> Result<ClusteringFunction> {
        fit(x, self)
    }
}

pub fn fit(x: &Dataset, cfg: &AlgoConfig) -> Result<ClusteringFunction> {
    match cfg.algorithm {
        AlgorithmKind::KMeans => fit_kmeans(x, cfg),
        AlgorithmKind::MiniBatchKMeans => fit_minibatch_kmeans(x, cfg),
        AlgorithmKind::AgglomerativeWard => fit_agglomerative(x, cfg),
        AlgorithmKind::Dbscan => fit_dbscan(x, cfg),
    }
}
