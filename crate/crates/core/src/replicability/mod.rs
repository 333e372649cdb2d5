//! Bootstrap estimates of cross-study replicability.
//!
//! The global index compares, on a test study, the partition induced by a
//! function trained on another study with the partition induced by a
//! function trained on the test study itself. The local index does the same
//! with binary co-clustering partitions anchored at a point of interest.
//!
//! Every bootstrap iteration `b` resamples study `s` from the stream
//! `plan.seed.derive(Iteration, b).derive(Study, s)` and fits all studies
//! with `A.seed.derive(Fit, b)`, so iterations are independent tasks and the
//! output does not depend on how they are scheduled.

mod global;
mod local;

use serde::{Deserialize, Serialize};

pub use global::{
    algorithm1, algorithm1_multi, algorithm2, cross_study, monte_carlo, point_estimate_r,
    CrossStudyScores,
};
pub use local::{
    algorithm3, cluster_local_replicability, local_replicability_grid, local_scores,
    GridCell, LocalScores,
};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::metrics::ScoreKind;
use crate::rng::{Role, SeededRng};
use crate::stats::Summary;

/// Number of bootstrap iterations, their seed, and how to run them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapPlan {
    pub iterations: usize,
    pub seed: SeededRng,
    /// When false every iteration reuses the original datasets (diagnostic mode).
    pub resample: bool,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for BootstrapPlan {
    fn default() -> Self {
        Self {
            iterations: 100,
            seed: SeededRng::default(),
            resample: true,
            execution: Execution::Auto,
        }
    }
}

impl BootstrapPlan {
    pub fn new(iterations: usize, seed: SeededRng) -> Self {
        Self {
            iterations,
            seed,
            ..Self::default()
        }
    }

    pub fn without_resampling(mut self) -> Self {
        self.resample = false;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Config("bootstrap iterations must be at least 1".into()));
        }
        Ok(())
    }

    /// Study `s` as seen by iteration `b`.
    pub fn draw(&self, x: &Dataset, b: usize, s: usize) -> Result<Dataset> {
        if !self.resample {
            return Ok(x.clone());
        }
        let stream = self
            .seed
            .derive(Role::Iteration, b as u64)
            .derive(Role::Study, s as u64);
        resample(x, stream)
    }
}

/// Bootstrap replicate of `x`: `n` rows drawn with replacement.
pub fn resample(x: &Dataset, seed: SeededRng) -> Result<Dataset> {
    use rand::Rng;
    let mut rng = seed.rng();
    let n = x.n();
    let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    x.select(&idx)
}

/// Per-iteration scores of one index together with their summary.
#[derive(Clone, Debug, Serialize)]
pub struct ReplicabilityReport {
    pub kind: ScoreKind,
    pub scores: Vec<f64>,
    /// Score on the unresampled data, when computed.
    pub point_estimate: Option<f64>,
    /// Iterations whose adjusted score fell back to the degenerate convention.
    pub degenerate: usize,
    pub summary: Summary,
}

impl ReplicabilityReport {
    pub fn new(kind: ScoreKind, scores: Vec<f64>, point_estimate: Option<f64>, degenerate: usize) -> Self {
        let summary = Summary::new(&scores);
        Self {
            kind,
            scores,
            point_estimate,
            degenerate,
            summary,
        }
    }

    pub fn mean(&self) -> f64 {
        self.summary.mean
    }

    pub fn sd(&self) -> f64 {
        self.summary.sd
    }

    pub fn quantile(&self, alpha: f64) -> f64 {
        self.summary.quantile(alpha)
    }
}

/// Scores of one training study against every other study.
#[derive(Clone, Debug, Serialize)]
pub struct MultiStudyReport {
    pub train: usize,
    /// `(test study index, report)` for every test study other than `train`.
    pub per_study: Vec<(usize, ReplicabilityReport)>,
    /// Per-iteration average over the test studies.
    pub aggregate: Vec<f64>,
    pub aggregate_summary: Summary,
}

pub(crate) fn check_kind(kind: ScoreKind) -> Result<()> {
    if kind.is_adjusted() {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "replicability indices use adjusted scores (ari, ami), not `{kind}`"
        )))
    }
}

pub(crate) fn check_kinds(kinds: &[ScoreKind]) -> Result<()> {
    if kinds.is_empty() {
        return Err(Error::Config("no score kinds requested".into()));
    }
    kinds.iter().try_for_each(|&k| check_kind(k))
}

pub(crate) fn check_same_p(studies: &[&Dataset]) -> Result<()> {
    let p = studies[0].p();
    for x in studies {
        if x.p() != p {
            return Err(Error::Dimension {
                context: "study feature dimension",
                expected: p,
                found: x.p(),
            });
        }
    }
    Ok(())
}
