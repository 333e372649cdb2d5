use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::MixtureSpec;
use crate::error::{Error, Result};
use crate::rng::{Role, SeededRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioId {
    /// Components A, B, C in the plane, σ = 0.2.
    LocalF1,
    /// Components A, B, D in the plane, σ = 0.2.
    LocalF2,
    /// High-dimensional mixture with well-separated means.
    Dim64F1,
    /// [`ScenarioId::Dim64F1`] with the first half of every mean's coordinates permuted.
    Dim64F2,
    CalibA1F1,
    CalibA1F2,
    CalibA1bF1,
    CalibA1bF2,
    /// Standard Gaussian, no cluster structure.
    NoclusterGauss,
    /// 25 well-separated planar components on a 5 × 5 grid.
    SamplesizeK25,
    /// 15 well-separated planar components on a 5 × 3 grid.
    R15Like,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 11] = [
        ScenarioId::LocalF1,
        ScenarioId::LocalF2,
        ScenarioId::Dim64F1,
        ScenarioId::Dim64F2,
        ScenarioId::CalibA1F1,
        ScenarioId::CalibA1F2,
        ScenarioId::CalibA1bF1,
        ScenarioId::CalibA1bF2,
        ScenarioId::NoclusterGauss,
        ScenarioId::SamplesizeK25,
        ScenarioId::R15Like,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioId::LocalF1 => "local_f1",
            ScenarioId::LocalF2 => "local_f2",
            ScenarioId::Dim64F1 => "dim64_f1",
            ScenarioId::Dim64F2 => "dim64_f2",
            ScenarioId::CalibA1F1 => "calib_a1_f1",
            ScenarioId::CalibA1F2 => "calib_a1_f2",
            ScenarioId::CalibA1bF1 => "calib_a1b_f1",
            ScenarioId::CalibA1bF2 => "calib_a1b_f2",
            ScenarioId::NoclusterGauss => "nocluster_gauss",
            ScenarioId::SamplesizeK25 => "samplesize_k25",
            ScenarioId::R15Like => "r15_like",
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        ScenarioId::ALL
            .into_iter()
            .find(|id| id.name() == lower)
            .ok_or_else(|| Error::Config(format!("unknown scenario `{s}`")))
    }
}

/// Knobs of the parameterised scenarios; fixed scenarios ignore them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioParams {
    /// Dimension of `nocluster_gauss` and of the `dim64_*` mixtures.
    pub dim: Option<usize>,
    /// Number of components of the `dim64_*` mixtures.
    pub components: Option<usize>,
    /// Seed of the generated `dim64_*` means and coordinate permutation.
    pub means_seed: u64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            dim: None,
            components: None,
            means_seed: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedScenario {
    pub id: ScenarioId,
    pub spec: MixtureSpec,
}

pub const MU_A: [f64; 2] = [-2.0, -2.0];
pub const MU_B: [f64; 2] = [0.0, 2.0];
pub const MU_C: [f64; 2] = [2.0, -2.0];
pub const MU_D: [f64; 2] = [-1.3, 0.65];

fn means(list: &[[f64; 2]]) -> Vec<Vec<f64>> {
    list.iter().map(|m| m.to_vec()).collect()
}

fn grid_means(cols: usize, rows: usize, spacing: f64) -> Vec<Vec<f64>> {
    (0..rows)
        .flat_map(|r| (0..cols).map(move |c| vec![c as f64 * spacing, r as f64 * spacing]))
        .collect()
}

/// Means of the high-dimensional pair. Separation lives in the first
/// `p/2` coordinates (the ones that get permuted); the remaining coordinates
/// are zero for every component. Returns `(F1 means, F2 means)`.
fn dim64_means(p: usize, k: usize, seed: u64) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    if p < 2 || k < 1 {
        return Err(Error::Config(format!("dim64 scenario needs p >= 2 and k >= 1, got p = {p}, k = {k}")));
    }
    let half = p / 2;
    let base = SeededRng::new(seed);
    let scale = 20.0 / (2.0 * half as f64).sqrt();
    let normal = Normal::new(0.0, scale).expect("positive scale");
    let mut found = None;
    for attempt in 0..1000u64 {
        let mut rng = base.derive(Role::MixtureMeans, attempt).rng();
        let f1: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                let mut m: Vec<f64> = (0..half).map(|_| normal.sample(&mut rng)).collect();
                m.resize(p, 0.0);
                m
            })
            .collect();
        let min_gap = (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .map(|(i, j)| crate::data::squared_euclidean(&f1[i], &f1[j]).sqrt())
            .fold(f64::INFINITY, f64::min);
        if min_gap >= 10.0 {
            found = Some(f1);
            break;
        }
    }
    let f1 = found.ok_or_else(|| Error::Config(format!("could not place {k} separated means in {half} dimensions")))?;
    let mut perm: Vec<usize> = (0..half).collect();
    perm.shuffle(&mut base.derive(Role::MixtureMeans, u64::MAX).rng());
    if half >= 2 && perm.iter().enumerate().all(|(i, &j)| i == j) {
        perm.swap(0, 1);
    }
    let f2 = f1
        .iter()
        .map(|m| {
            let mut out = m.clone();
            for (i, &j) in perm.iter().enumerate() {
                out[i] = m[j];
            }
            out
        })
        .collect();
    Ok((f1, f2))
}

/// The mixture behind `id`.
pub fn build_scenario(id: ScenarioId, params: &ScenarioParams) -> Result<NamedScenario> {
    let spec = match id {
        ScenarioId::LocalF1 => MixtureSpec::equal_weights(&means(&[MU_A, MU_B, MU_C]), 0.2)?,
        ScenarioId::LocalF2 => MixtureSpec::equal_weights(&means(&[MU_A, MU_B, MU_D]), 0.2)?,
        ScenarioId::CalibA1F1 => {
            MixtureSpec::equal_weights(&means(&[[0.0, -7.0], [3.5, 3.0], [-2.0, 2.0], [2.0, -2.0]]), 1.0)?
        }
        ScenarioId::CalibA1F2 => {
            MixtureSpec::equal_weights(&means(&[[-1.0, -7.0], [4.2, 3.3], [-2.5, 1.8], [2.2, -3.0]]), 1.0)?
        }
        ScenarioId::CalibA1bF1 => MixtureSpec::equal_weights(&means(&[[0.0, -7.0], [3.5, -2.0], [2.0, -2.0]]), 1.0)?,
        ScenarioId::CalibA1bF2 => {
            MixtureSpec::equal_weights(&means(&[[-1.0, -7.0], [4.2, -1.8], [-2.5, 1.8]]), 1.0)?
        }
        ScenarioId::NoclusterGauss => {
            let d = params.dim.unwrap_or(2);
            if d == 0 {
                return Err(Error::Config("nocluster_gauss needs dim >= 1".into()));
            }
            MixtureSpec::equal_weights(&[vec![0.0; d]], 1.0)?
        }
        ScenarioId::SamplesizeK25 => MixtureSpec::equal_weights(&grid_means(5, 5, 10.0), 1.0)?,
        ScenarioId::R15Like => MixtureSpec::equal_weights(&grid_means(5, 3, 5.0), 0.5)?,
        ScenarioId::Dim64F1 | ScenarioId::Dim64F2 => {
            let p = params.dim.unwrap_or(64);
            let k = params.components.unwrap_or(16);
            let (f1, f2) = dim64_means(p, k, params.means_seed)?;
            let chosen = if id == ScenarioId::Dim64F1 { f1 } else { f2 };
            MixtureSpec::equal_weights(&chosen, 1.0)?
        }
    };
    Ok(NamedScenario { id, spec })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(id: ScenarioId) -> MixtureSpec {
        build_scenario(id, &ScenarioParams::default()).unwrap().spec
    }

    #[test]
    fn fixed_parameters() {
        let f2 = build(ScenarioId::LocalF2);
        assert_eq!(f2.components[2].mean, vec![-1.3, 0.65]);
        assert_eq!(f2.components[0].variance, 0.2 * 0.2);
        let a1 = build(ScenarioId::CalibA1F1);
        assert_eq!(a1.components[0].mean, vec![0.0, -7.0]);
        assert_eq!(a1.components[0].variance, 1.0);
        let g = build_scenario(ScenarioId::NoclusterGauss, &ScenarioParams { dim: Some(10), ..Default::default() }).unwrap();
        assert_eq!(g.spec.components[0].mean, vec![0.0; 10]);
        assert_eq!(build(ScenarioId::SamplesizeK25).k(), 25);
        assert_eq!(build(ScenarioId::R15Like).k(), 15);
    }

    #[test]
    fn dim64_permutation_property() {
        let f1 = build(ScenarioId::Dim64F1);
        let f2 = build(ScenarioId::Dim64F2);
        assert_eq!((f1.k(), f1.p()), (16, 64));
        let mut differs = false;
        for (a, b) in f1.components.iter().zip(&f2.components) {
            let mut x = a.mean.clone();
            let mut y = b.mean.clone();
            assert_eq!(x[32..], y[32..]);
            differs |= x != y;
            x.sort_by(f64::total_cmp);
            y.sort_by(f64::total_cmp);
            assert_eq!(x, y);
        }
        assert!(differs);
        for i in 0..16 {
            for j in i + 1..16 {
                assert!(crate::data::squared_euclidean(&f1.components[i].mean, &f1.components[j].mean) >= 100.0);
            }
        }
    }

    #[test]
    fn names_round_trip() {
        for id in ScenarioId::ALL {
            assert_eq!(id.name().parse::<ScenarioId>().unwrap(), id);
            assert_eq!(serde_json_name(id), id.name());
        }
        assert!("nope".parse::<ScenarioId>().is_err());
    }

    fn serde_json_name(id: ScenarioId) -> String {
        serde_json::to_value(id).unwrap().as_str().unwrap().to_string()
    }
}
