//! Single-study replicability baselines: perturbation stability (minimal
//! matching distance, Jaccard, R and D indices), feature-subset inclusion
//! scores, prediction strength, in-group proportion and a nearest-neighbour
//! significance test for clustering structure.
//!
//! Every perturbed refit reuses the algorithm's own seed, so the only source
//! of variation between iterations is the perturbation itself. With no
//! perturbation the refit reproduces the original function exactly.

mod nn;
mod prediction;
mod sigtest;
mod stability;

use rand::seq::index::sample as sample_indices;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

pub use nn::nearest_neighbors;
pub use prediction::{igp, prediction_strength, prediction_strength_of, PredictionStrength};
pub use sigtest::{nn_distance_statistics, significance_test, NullModel, TestReport};
pub use stability::{
    d_per_cluster, hennig_jaccard, jaccard_per_cluster, mcshane_d_index, mcshane_r_index,
    r_per_cluster, smolkin_ghosh, stability_mmd,
};

use crate::algos::AlgoConfig;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::rng::{Role, SeededRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbMode {
    Subsample,
    GaussianNoise,
    Both,
}

impl PerturbMode {
    fn subsamples(self) -> bool {
        matches!(self, PerturbMode::Subsample | PerturbMode::Both)
    }

    fn adds_noise(self) -> bool {
        matches!(self, PerturbMode::GaussianNoise | PerturbMode::Both)
    }
}

/// How datasets are perturbed in the stability baselines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PerturbSpec {
    pub mode: PerturbMode,
    /// Fraction of rows kept (without replacement) in subsample modes.
    pub subsample_fraction: f64,
    /// Per-entry noise variance; `None` means half the average per-feature
    /// sample variance of the data.
    pub noise_variance: Option<f64>,
    pub iterations: usize,
    pub seed: SeededRng,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for PerturbSpec {
    fn default() -> Self {
        Self {
            mode: PerturbMode::GaussianNoise,
            subsample_fraction: 0.8,
            noise_variance: None,
            iterations: 100,
            seed: SeededRng::default(),
            execution: Execution::Auto,
        }
    }
}

impl PerturbSpec {
    pub fn noise(iterations: usize, seed: SeededRng) -> Self {
        Self {
            iterations,
            seed,
            ..Self::default()
        }
    }

    pub fn subsample(fraction: f64, iterations: usize, seed: SeededRng) -> Self {
        Self {
            mode: PerturbMode::Subsample,
            subsample_fraction: fraction,
            iterations,
            seed,
            ..Self::default()
        }
    }

    /// No perturbation at all: every iteration sees the original data.
    pub fn zero(iterations: usize, seed: SeededRng) -> Self {
        Self {
            noise_variance: Some(0.0),
            ..Self::noise(iterations, seed)
        }
    }

    pub fn with_noise_variance(mut self, variance: f64) -> Self {
        self.noise_variance = Some(variance);
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    fn validate(&self, x: &Dataset, k: usize) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Config("perturbation iterations must be at least 1".into()));
        }
        if !(self.subsample_fraction > 0.0 && self.subsample_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "subsample_fraction must lie in (0, 1], got {}",
                self.subsample_fraction
            )));
        }
        if let Some(v) = self.noise_variance {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("noise_variance must be finite and >= 0, got {v}")));
            }
        }
        if self.mode.subsamples() && self.kept(x.n()) < k {
            return Err(Error::Config(format!(
                "subsample of {} rows cannot hold k = {k} clusters",
                self.kept(x.n())
            )));
        }
        Ok(())
    }

    fn kept(&self, n: usize) -> usize {
        ((self.subsample_fraction * n as f64).floor() as usize).clamp(1, n)
    }

    /// Noise variance actually used on `x`.
    pub fn resolved_noise_variance(&self, x: &Dataset) -> f64 {
        self.noise_variance.unwrap_or_else(|| {
            let vars = x.column_variances();
            vars.iter().sum::<f64>() / vars.len() as f64 / 2.0
        })
    }

    /// Perturbed copy number `b` of `x` and the original indices of its rows
    /// (ascending).
    pub fn perturb(&self, x: &Dataset, b: usize) -> Result<(Vec<usize>, Dataset)> {
        let mut rng = self.seed.derive(Role::Perturb, b as u64).rng();
        let indices: Vec<usize> = if self.mode.subsamples() {
            let mut idx = sample_indices(&mut rng, x.n(), self.kept(x.n())).into_vec();
            idx.sort_unstable();
            idx
        } else {
            (0..x.n()).collect()
        };
        let mut data = x.select(&indices)?;
        let variance = self.resolved_noise_variance(x);
        if self.mode.adds_noise() && variance > 0.0 {
            let noise = Normal::new(0.0, variance.sqrt())
                .map_err(|e| Error::Config(format!("noise distribution: {e}")))?;
            data = data.map_values(|_, _, v| v + noise.sample(&mut rng))?;
        }
        Ok((indices, data))
    }
}

/// Score of one original cluster; `value` is `None` where the score is undefined.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterScore {
    pub cluster: usize,
    pub size: usize,
    pub value: Option<f64>,
}

/// Runs `f` over all perturbation iterations. Failed iterations are
/// skipped; more than 10% failures is an error.
fn run_perturbed<T, F>(a: &AlgoConfig, x: &Dataset, spec: &PerturbSpec, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&[usize], &Dataset) -> Result<T> + Sync + Send,
{
    spec.validate(x, a.k)?;
    let outcomes = map_indexed(spec.iterations, spec.execution, |b| {
        let (idx, data) = spec.perturb(x, b)?;
        Ok(f(&idx, &data))
    })?;
    let total = outcomes.len();
    let mut ok = Vec::with_capacity(total);
    let mut failed = 0;
    let mut last = String::new();
    for o in outcomes {
        match o {
            Ok(v) => ok.push(v),
            Err(e) => {
                failed += 1;
                last = e.to_string();
            }
        }
    }
    if failed > 0 {
        log::warn!("{failed} of {total} perturbed fits failed and were skipped");
    }
    if failed * 10 > total || ok.is_empty() {
        return Err(Error::PerturbationFailures { failed, total, last });
    }
    Ok(ok)
}

/// Averages per-iteration, per-cluster values, ignoring iterations where a
/// cluster's value is undefined.
fn average_clusters(sizes: &[usize], runs: &[Vec<Option<f64>>]) -> Vec<ClusterScore> {
    sizes
        .iter()
        .enumerate()
        .map(|(j, &size)| {
            let vals: Vec<f64> = runs.iter().filter_map(|r| r[j]).collect();
            ClusterScore {
                cluster: j,
                size,
                value: (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64),
            }
        })
        .collect()
}
