//! Synthetic Gaussian mixtures, named scenarios, CSV loading and splitting.

mod csv_io;
mod scenarios;

use rand::distr::weighted::WeightedIndex;
use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

pub use csv_io::{load_csv, CsvOptions, LabelColumn, LoadedCsv};
pub use scenarios::{build_scenario, NamedScenario, ScenarioId, ScenarioParams};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::rng::{Role, SeededRng};

/// One isotropic Gaussian component `weight · N(mean, variance · I)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub mean: Vec<f64>,
    pub variance: f64,
    pub weight: f64,
}

/// A finite mixture of isotropic Gaussians.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub components: Vec<Component>,
}

impl MixtureSpec {
    /// Validated mixture. Weights must be non-negative and sum to one;
    /// zero-weight components are allowed and never sampled.
    pub fn new(components: Vec<Component>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::Config("mixture has no components".into()))?;
        let p = first.mean.len();
        if p == 0 {
            return Err(Error::Config("component means must have p >= 1".into()));
        }
        for (i, c) in components.iter().enumerate() {
            if c.mean.len() != p {
                return Err(Error::Dimension {
                    context: "component mean",
                    expected: p,
                    found: c.mean.len(),
                });
            }
            if c.mean.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config(format!("component {i} has a non-finite mean")));
            }
            if !(c.variance > 0.0 && c.variance.is_finite()) {
                return Err(Error::Config(format!("component {i} variance must be > 0")));
            }
            if !(c.weight >= 0.0 && c.weight.is_finite()) {
                return Err(Error::Config(format!("component {i} weight must be >= 0")));
            }
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("mixture weights sum to {total}, not 1")));
        }
        Ok(Self { components })
    }

    /// Equal-weight mixture with common standard deviation `sigma`.
    pub fn equal_weights(means: &[Vec<f64>], sigma: f64) -> Result<Self> {
        let w = 1.0 / means.len().max(1) as f64;
        Self::new(
            means
                .iter()
                .map(|m| Component {
                    mean: m.clone(),
                    variance: sigma * sigma,
                    weight: w,
                })
                .collect(),
        )
    }

    pub fn p(&self) -> usize {
        self.components[0].mean.len()
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn means(&self) -> Vec<&[f64]> {
        self.components.iter().map(|c| c.mean.as_slice()).collect()
    }
}

/// Draws from a mixture together with the generating component of each row.
#[derive(Clone, Debug)]
pub struct LabelledSample {
    pub data: Dataset,
    /// Index of the generating component per row.
    pub components: Vec<usize>,
}

impl LabelledSample {
    pub fn truth(&self) -> Partition {
        Partition::from_labels(&self.components).expect("sample is non-empty")
    }
}

/// `n` i.i.d. draws: a component by weight, then its Gaussian.
pub fn sample(spec: &MixtureSpec, n: usize, seed: SeededRng) -> Result<LabelledSample> {
    if n == 0 {
        return Err(Error::EmptyInput("sample size must be at least 1".into()));
    }
    let weights = WeightedIndex::new(spec.components.iter().map(|c| c.weight))
        .map_err(|e| Error::Config(format!("mixture weights: {e}")))?;
    let mut rng = seed.derive(Role::Sample, 0).rng();
    let p = spec.p();
    let mut values = Vec::with_capacity(n * p);
    let mut components = Vec::with_capacity(n);
    for _ in 0..n {
        let c = weights.sample(&mut rng);
        let comp = &spec.components[c];
        let sd = comp.variance.sqrt();
        for &mu in &comp.mean {
            let z: f64 = StandardNormal.sample(&mut rng);
            values.push(mu + sd * z);
        }
        components.push(c);
    }
    Ok(LabelledSample {
        data: Dataset::from_flat(values, p)?,
        components,
    })
}

/// Indices of a uniformly random split into halves of sizes `⌈n/2⌉` and
/// `⌊n/2⌋`, each sorted ascending.
pub fn split_half_indices(n: usize, seed: SeededRng) -> Result<(Vec<usize>, Vec<usize>)> {
    if n < 2 {
        return Err(Error::EmptyInput(format!("cannot split {n} row(s) into halves")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut seed.derive(Role::Split, 0).rng());
    let mut second = idx.split_off(n.div_ceil(2));
    idx.sort_unstable();
    second.sort_unstable();
    Ok((idx, second))
}

pub fn split_half(x: &Dataset, seed: SeededRng) -> Result<(Dataset, Dataset)> {
    let (a, b) = split_half_indices(x.n(), seed)?;
    Ok((x.select(&a)?, x.select(&b)?))
}
