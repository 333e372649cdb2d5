use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::nearest_neighbors;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::rng::{Role, SeededRng};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NullModel {
    /// Multivariate Gaussian with the sample mean and sample covariance.
    #[default]
    GaussianFit,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestReport {
    pub s_star: f64,
    pub null_scores: Vec<f64>,
    /// `(1 + #{b : s_b >= s_star}) / (B + 1)`.
    pub p_value: f64,
    /// Ridge added to the covariance diagonal when it was not positive definite.
    pub ridge: f64,
}

/// Tests for clustering structure: the empirical CDF of nearest-neighbour
/// distances in `x` is compared with those of `b` samples of the same size
/// from a Gaussian fitted to `x`.
pub fn significance_test(
    x: &Dataset,
    b: usize,
    null_model: NullModel,
    seed: SeededRng,
    execution: Execution,
) -> Result<TestReport> {
    let NullModel::GaussianFit = null_model;
    if x.n() < 3 {
        return Err(Error::Config(format!("significance test needs n >= 3, got {}", x.n())));
    }
    if b < 19 {
        return Err(Error::Config(format!("significance test needs B >= 19, got {b}")));
    }
    let (mean, chol, ridge) = gaussian_fit(x)?;
    let observed = nn_distances(x)?;
    let nulls = map_indexed(b, execution, |i| {
        let mut rng = seed.derive(Role::NullDraw, i as u64).rng();
        let p = x.p();
        let mut values = Vec::with_capacity(x.n() * p);
        let mut z = vec![0.0; p];
        for _ in 0..x.n() {
            z.iter_mut().for_each(|v| *v = StandardNormal.sample(&mut rng));
            for r in 0..p {
                let dot: f64 = (0..=r).map(|c| chol[r * p + c] * z[c]).sum();
                values.push(mean[r] + dot);
            }
        }
        nn_distances(&Dataset::from_flat(values, p)?)
    })?;
    let mut samples = Vec::with_capacity(b + 1);
    samples.push(observed);
    samples.extend(nulls);
    let stats = nn_distance_statistics(&samples);
    let s_star = stats[0];
    let exceed = stats[1..].iter().filter(|&&s| s >= s_star).count();
    Ok(TestReport {
        s_star,
        null_scores: stats[1..].to_vec(),
        p_value: (1 + exceed) as f64 / (b + 1) as f64,
        ridge,
    })
}

fn nn_distances(x: &Dataset) -> Result<Vec<f64>> {
    let mut d: Vec<f64> = nearest_neighbors(x)?.into_iter().map(|(_, d)| d).collect();
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Sample mean, lower Cholesky factor of the sample covariance (row-major)
/// and the ridge that had to be added to make it positive definite.
fn gaussian_fit(x: &Dataset) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let p = x.p();
    let mean = x.column_means();
    let mut cov = vec![0.0; p * p];
    for row in x.rows() {
        for r in 0..p {
            for c in 0..=r {
                cov[r * p + c] += (row[r] - mean[r]) * (row[c] - mean[c]);
            }
        }
    }
    let denom = (x.n() - 1) as f64;
    for r in 0..p {
        for c in 0..=r {
            cov[r * p + c] /= denom;
            cov[c * p + r] = cov[r * p + c];
        }
    }
    let scale = (0..p).map(|i| cov[i * p + i]).sum::<f64>() / p as f64;
    let mut ridge = 0.0;
    loop {
        let mut a = cov.clone();
        (0..p).for_each(|i| a[i * p + i] += ridge);
        if let Some(l) = cholesky(&a, p) {
            if ridge > 0.0 {
                log::warn!("sample covariance is singular; added ridge {ridge:e} to its diagonal");
            }
            return Ok((mean, l, ridge));
        }
        ridge = if ridge == 0.0 { 1e-10 * scale.max(1e-12) } else { ridge * 10.0 };
        if !ridge.is_finite() || ridge > 1e6 * scale.max(1.0) {
            return Err(Error::Undefined("covariance could not be regularised".into()));
        }
    }
}

fn cholesky(a: &[f64], p: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i * p + k] * l[j * p + k]).sum();
            if i == j {
                let d = a[i * p + i] - s;
                if d <= 0.0 || !d.is_finite() {
                    return None;
                }
                l[i * p + i] = d.sqrt();
            } else {
                l[i * p + j] = (a[i * p + j] - s) / l[j * p + j];
            }
        }
    }
    Some(l)
}

/// For sorted distance samples `G_0..G_B` (each an empirical CDF), returns
/// `s_b = ∫ (G_b − mean_{c≠b} G_c)² dy` for every `b`, integrated exactly
/// over the piecewise-constant CDFs up to the largest pooled distance.
///
/// With `S = Σ_c G_c` the integrand equals `((B + 1)·G_b − S)² / B²`.
pub fn nn_distance_statistics(samples: &[Vec<f64>]) -> Vec<f64> {
    let count = samples.len();
    assert!(count >= 2, "need at least two samples");
    let b = (count - 1) as f64;
    let mut pooled: Vec<(f64, usize)> = samples
        .iter()
        .enumerate()
        .flat_map(|(s, d)| d.iter().map(move |&v| (v, s)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let sizes: Vec<f64> = samples.iter().map(|d| d.len() as f64).collect();
    let mut seen = vec![0usize; count];
    let mut out = vec![0.0; count];
    let mut g = vec![0.0; count];
    for w in 0..pooled.len() {
        let (y, s) = pooled[w];
        seen[s] += 1;
        g[s] = seen[s] as f64 / sizes[s];
        let Some(&(next, _)) = pooled.get(w + 1) else { break };
        let width = next - y;
        if width == 0.0 {
            continue;
        }
        let total: f64 = g.iter().sum();
        for (o, &gb) in out.iter_mut().zip(&g) {
            let diff = (b + 1.0) * gb - total;
            *o += width * diff * diff;
        }
    }
    out.iter().map(|v| v / (b * b)).collect()
}
