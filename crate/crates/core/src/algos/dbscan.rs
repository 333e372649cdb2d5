use std::collections::VecDeque;

use super::AlgoConfig;
use crate::data::Dataset;
use crate::error::Result;
use crate::function::{AlgorithmKind, ClusteringFunction};

/// Training-set labelling produced by DBSCAN.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DbscanLabels {
    /// `Some(c)` for clustered points, `None` for noise.
    pub assignment: Vec<Option<usize>>,
    pub n_clusters: usize,
}

impl DbscanLabels {
    /// Labels with all noise points sharing one extra block `n_clusters`.
    pub fn with_noise_block(&self) -> Vec<usize> {
        self.assignment
            .iter()
            .map(|a| a.unwrap_or(self.n_clusters))
            .collect()
    }

    pub fn noise_count(&self) -> usize {
        self.assignment.iter().filter(|a| a.is_none()).count()
    }
}

/// Density clustering with `|N_eps(x)| ≥ min_pts` (the point itself counts)
/// marking core points. Clusters are grown from cores in row order; a border
/// point joins the first cluster that reaches it.
pub fn dbscan_labels(x: &Dataset, eps: f64, min_pts: usize, cfg: &AlgoConfig) -> DbscanLabels {
    let n = x.n();
    let neighbours: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| cfg.metric.distance(x.row(i), x.row(j)) <= eps)
                .collect()
        })
        .collect();
    let core: Vec<bool> = neighbours.iter().map(|nb| nb.len() >= min_pts).collect();
    let mut assignment: Vec<Option<usize>> = vec![None; n];
    let mut n_clusters = 0;
    for start in 0..n {
        if !core[start] || assignment[start].is_some() {
            continue;
        }
        let c = n_clusters;
        n_clusters += 1;
        assignment[start] = Some(c);
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for &j in &neighbours[i] {
                if assignment[j].is_none() {
                    assignment[j] = Some(c);
                    if core[j] {
                        queue.push_back(j);
                    }
                }
            }
        }
    }
    DbscanLabels {
        assignment,
        n_clusters,
    }
}

/// DBSCAN lifted to a function: nearest non-noise training point decides the
/// label. With no clusters at all the result is a single-cluster function
/// flagged with [`ClusteringFunction::all_noise`].
pub fn fit_dbscan(x: &Dataset, cfg: &AlgoConfig) -> Result<ClusteringFunction> {
    cfg.validate()?;
    let result = dbscan_labels(x, cfg.eps, cfg.min_pts, cfg);
    if result.n_clusters == 0 {
        log::warn!("dbscan: every point is noise (eps = {}, min_pts = {})", cfg.eps, cfg.min_pts);
        let f = ClusteringFunction::nearest_neighbor(
            AlgorithmKind::Dbscan,
            x.clone(),
            &vec![0; x.n()],
            cfg.metric,
        )?;
        return Ok(f.flag_all_noise());
    }
    let kept: Vec<usize> = (0..x.n()).filter(|&i| result.assignment[i].is_some()).collect();
    let labels: Vec<usize> = kept.iter().map(|&i| result.assignment[i].unwrap()).collect();
    ClusteringFunction::nearest_neighbor(AlgorithmKind::Dbscan, x.select(&kept)?, &labels, cfg.metric)
}
