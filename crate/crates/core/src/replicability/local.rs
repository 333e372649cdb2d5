use std::collections::HashMap;

use serde::Serialize;

use super::global::fit_config;
use super::{check_kind, check_same_p, BootstrapPlan, ReplicabilityReport};
use crate::algos::AlgoConfig;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::function::ClusteringFunction;
use crate::metrics::{adjusted_of, ContingencyTable, ScoreKind};
use crate::stats::{mean, sample_sd};

/// Local replicability scores for a set of anchors, `[anchor][iteration]`.
#[derive(Clone, Debug)]
pub struct LocalScores {
    pub kind: ScoreKind,
    pub iterations: usize,
    values: Vec<Vec<f64>>,
    /// Unresampled score per anchor.
    pub point_estimates: Vec<f64>,
}

impl LocalScores {
    pub fn anchors(&self) -> usize {
        self.values.len()
    }

    pub fn scores(&self, anchor: usize) -> &[f64] {
        &self.values[anchor]
    }

    pub fn report(&self, anchor: usize) -> ReplicabilityReport {
        ReplicabilityReport::new(
            self.kind,
            self.values[anchor].clone(),
            Some(self.point_estimates[anchor]),
            0,
        )
    }
}

/// Scores of binary co-clustering partitions for all anchors, given the two
/// functions of one iteration and the test data they are compared on.
struct AnchorScorer {
    kind: ScoreKind,
    table: ContingencyTable,
    cache: HashMap<(usize, usize), f64>,
}

impl AnchorScorer {
    fn new(kind: ScoreKind, f_tr: &ClusteringFunction, f_te: &ClusteringFunction, xte: &Dataset) -> Result<Self> {
        let lt = f_tr.labels_of(xte)?;
        let ls = f_te.labels_of(xte)?;
        Ok(Self {
            kind,
            table: ContingencyTable::from_label_slices(&lt, f_tr.k(), &ls, f_te.k()),
            cache: HashMap::new(),
        })
    }

    /// Score when the anchor falls in training cluster `i` and test cluster `j`.
    /// The 2 × 2 table of the binary partitions follows from the full table.
    fn score(&mut self, i: usize, j: usize) -> Result<f64> {
        if let Some(&s) = self.cache.get(&(i, j)) {
            return Ok(s);
        }
        let n11 = self.table.get(i, j);
        let a = self.table.row_sums()[i];
        let b = self.table.col_sums()[j];
        let m = self.table.m();
        let binary = ContingencyTable::from_counts(2, 2, vec![n11, a - n11, b - n11, m + n11 - a - b])?;
        let s = adjusted_of(self.kind, &binary)?.value;
        self.cache.insert((i, j), s);
        Ok(s)
    }

    fn score_anchors(&mut self, f_tr: &ClusteringFunction, f_te: &ClusteringFunction, anchors: &Dataset) -> Result<Vec<f64>> {
        let at = f_tr.labels_of(anchors)?;
        let ae = f_te.labels_of(anchors)?;
        at.iter().zip(&ae).map(|(&i, &j)| self.score(i, j)).collect()
    }
}

fn anchor_scores(
    a: &AlgoConfig,
    xtr: &Dataset,
    xte: &Dataset,
    anchors: &Dataset,
    kind: ScoreKind,
    b: usize,
) -> Result<Vec<f64>> {
    let cfg = fit_config(a, b);
    let f_tr = cfg.fit(xtr)?;
    let f_te = cfg.fit(xte)?;
    AnchorScorer::new(kind, &f_tr, &f_te, xte)?.score_anchors(&f_tr, &f_te, anchors)
}

/// Local replicability of every row of `anchors`. Within an iteration all
/// anchors share the same pair of fitted functions.
pub fn local_scores(
    a: &AlgoConfig,
    xtr: &Dataset,
    xte: &Dataset,
    anchors: &Dataset,
    kind: ScoreKind,
    plan: &BootstrapPlan,
) -> Result<LocalScores> {
    plan.validate()?;
    check_kind(kind)?;
    check_same_p(&[xtr, xte, anchors])?;
    let per_iteration = map_indexed(plan.iterations, plan.execution, |b| {
        let dtr = plan.draw(xtr, b, 0)?;
        let dte = plan.draw(xte, b, 1)?;
        anchor_scores(a, &dtr, &dte, anchors, kind, b)
    })?;
    let point_estimates = anchor_scores(a, xtr, xte, anchors, kind, 0)?;
    let values = (0..anchors.n())
        .map(|g| per_iteration.iter().map(|row| row[g]).collect())
        .collect();
    Ok(LocalScores {
        kind,
        iterations: plan.iterations,
        values,
        point_estimates,
    })
}

/// Local replicability at the single anchor `x`.
pub fn algorithm3(
    a: &AlgoConfig,
    xtr: &Dataset,
    xte: &Dataset,
    x: &[f64],
    kind: ScoreKind,
    plan: &BootstrapPlan,
) -> Result<ReplicabilityReport> {
    let anchor = Dataset::from_rows(&[x])?;
    Ok(local_scores(a, xtr, xte, &anchor, kind, plan)?.report(0))
}

/// Cluster-specific replicability: per iteration, the average local score
/// over the anchors in `cluster_points`.
pub fn cluster_local_replicability(
    a: &AlgoConfig,
    xtr: &Dataset,
    xte: &Dataset,
    cluster_points: &Dataset,
    kind: ScoreKind,
    plan: &BootstrapPlan,
) -> Result<ReplicabilityReport> {
    if cluster_points.n() == 0 {
        return Err(Error::EmptyInput("cluster has no anchor points".into()));
    }
    let local = local_scores(a, xtr, xte, cluster_points, kind, plan)?;
    let g = local.anchors() as f64;
    let scores = (0..local.iterations)
        .map(|b| (0..local.anchors()).map(|i| local.scores(i)[b]).sum::<f64>() / g)
        .collect();
    let point = local.point_estimates.iter().sum::<f64>() / g;
    Ok(ReplicabilityReport::new(kind, scores, Some(point), 0))
}

/// Mean and standard deviation of the local score at one grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridCell {
    pub point: Vec<f64>,
    pub mean: f64,
    pub sd: f64,
}

/// Local replicability summary at every row of `grid`.
pub fn local_replicability_grid(
    a: &AlgoConfig,
    xtr: &Dataset,
    xte: &Dataset,
    grid: &Dataset,
    kind: ScoreKind,
    plan: &BootstrapPlan,
) -> Result<Vec<GridCell>> {
    let local = local_scores(a, xtr, xte, grid, kind, plan)?;
    Ok((0..grid.n())
        .map(|g| GridCell {
            point: grid.row(g).to_vec(),
            mean: mean(local.scores(g)),
            sd: sample_sd(local.scores(g)),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::binary_partition;
    use crate::metrics::adjusted;
    use crate::rng::SeededRng;

    fn three_blobs(seed: u64, centres: &[(f64, f64)], n_per: usize) -> Dataset {
        use rand_distr::{Distribution, Normal};
        let mut rng = SeededRng::new(seed).rng();
        let noise = Normal::new(0.0, 0.2).unwrap();
        let mut rows = Vec::new();
        for _ in 0..n_per {
            for &(cx, cy) in centres {
                rows.push(vec![cx + noise.sample(&mut rng), cy + noise.sample(&mut rng)]);
            }
        }
        Dataset::from_rows(&rows).unwrap()
    }

    #[test]
    fn cached_scores_match_direct_binary_partitions() {
        let xtr = three_blobs(1, &[(-2.0, -2.0), (0.0, 2.0), (2.0, -2.0)], 20);
        let xte = three_blobs(2, &[(-2.0, -2.0), (0.0, 2.0), (-1.3, 0.65)], 20);
        let anchors = Dataset::from_rows(&[[-2.0, -2.0], [0.0, 2.0], [2.0, -2.0], [5.0, 5.0], [-1.0, 0.0]]).unwrap();
        let a = AlgoConfig::kmeans(3);
        let plan = BootstrapPlan::new(4, SeededRng::new(8));
        for kind in [ScoreKind::Ari, ScoreKind::Ami] {
            let local = local_scores(&a, &xtr, &xte, &anchors, kind, &plan).unwrap();
            for b in 0..4 {
                let dtr = plan.draw(&xtr, b, 0).unwrap();
                let dte = plan.draw(&xte, b, 1).unwrap();
                let cfg = fit_config(&a, b);
                let (f_tr, f_te) = (cfg.fit(&dtr).unwrap(), cfg.fit(&dte).unwrap());
                for g in 0..anchors.n() {
                    let u = binary_partition(&f_tr, anchors.row(g), &dte).unwrap();
                    let v = binary_partition(&f_te, anchors.row(g), &dte).unwrap();
                    let direct = adjusted(kind, &u, &v).unwrap().value;
                    assert!((local.scores(g)[b] - direct).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn identical_unresampled_data_scores_one() {
        let x = three_blobs(3, &[(-2.0, -2.0), (0.0, 2.0), (2.0, -2.0)], 10);
        let plan = BootstrapPlan::new(2, SeededRng::new(1)).without_resampling();
        let r = algorithm3(&AlgoConfig::kmeans(3), &x, &x, &[-2.0, -2.0], ScoreKind::Ari, &plan).unwrap();
        assert!(r.scores.iter().all(|&s| s == 1.0));
    }

    #[test]
    fn singleton_cluster_and_unit_grid_match_algorithm3() {
        let xtr = three_blobs(4, &[(-2.0, -2.0), (0.0, 2.0), (2.0, -2.0)], 10);
        let xte = three_blobs(5, &[(-2.0, -2.0), (0.0, 2.0), (-1.3, 0.65)], 10);
        let a = AlgoConfig::kmeans(3);
        let plan = BootstrapPlan::new(5, SeededRng::new(4));
        let x = [0.1, 1.9];
        let single = algorithm3(&a, &xtr, &xte, &x, ScoreKind::Ari, &plan).unwrap();
        let cluster = cluster_local_replicability(&a, &xtr, &xte, &Dataset::from_rows(&[x]).unwrap(), ScoreKind::Ari, &plan).unwrap();
        assert_eq!(single.scores, cluster.scores);
        let grid = local_replicability_grid(&a, &xtr, &xte, &Dataset::from_rows(&[x]).unwrap(), ScoreKind::Ari, &plan).unwrap();
        assert_eq!(grid[0].mean, single.mean());
        assert_eq!(grid[0].sd, single.sd());
    }

    #[test]
    fn absent_component_scores_zero() {
        let xtr = three_blobs(6, &[(-2.0, -2.0), (0.0, 2.0), (2.0, -2.0)], 30);
        let xte = three_blobs(7, &[(-2.0, -2.0), (0.0, 2.0), (-1.3, 0.65)], 30);
        let plan = BootstrapPlan::new(10, SeededRng::new(5));
        let r = algorithm3(&AlgoConfig::kmeans(3), &xtr, &xte, &[2.0, -2.0], ScoreKind::Ari, &plan).unwrap();
        assert!(r.mean() < 0.1, "{}", r.mean());
        let hi = algorithm3(&AlgoConfig::kmeans(3), &xtr, &xte, &[-2.0, -2.0], ScoreKind::Ari, &plan).unwrap();
        assert!(hi.mean() > 0.5, "{}", hi.mean());
    }
}
