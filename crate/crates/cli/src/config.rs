//! Experiment configuration: one JSON document per run.

use std::path::{Path, PathBuf};

use clurep_core::baselines::PerturbSpec;
use clurep_core::synthdata::{
    build_scenario, load_csv, sample, split_half, CsvOptions, LoadedCsv, ScenarioId, ScenarioParams,
};
use clurep_core::{AlgoConfig, Dataset, Error, Partition, Result, Role, ScoreKind, SeededRng};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Pairwise,
    Multistudy,
    Local,
    Grid,
    Baseline,
    Sigtest,
    Calibrate,
    SweepK,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Pairwise => "pairwise",
            Command::Multistudy => "multistudy",
            Command::Local => "local",
            Command::Grid => "grid",
            Command::Baseline => "baseline",
            Command::Sigtest => "sigtest",
            Command::Calibrate => "calibrate",
            Command::SweepK => "sweep-k",
        }
    }

    /// Bootstrap iterations used when the config does not set them.
    pub fn default_iterations(self) -> usize {
        match self {
            Command::Calibrate => 1000,
            Command::Sigtest => 200,
            _ => 100,
        }
    }
}

/// Where a dataset comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Source {
    Scenario {
        scenario: ScenarioId,
        n: usize,
        #[serde(default)]
        params: ScenarioParams,
        /// Sampling stream; defaults to the source's position in the config.
        #[serde(default)]
        stream: Option<u64>,
    },
    Csv {
        csv: PathBuf,
        #[serde(flatten)]
        options: CsvOptions,
    },
}

impl Source {
    pub fn is_scenario(&self) -> bool {
        matches!(self, Source::Scenario { .. })
    }

    /// Loads or draws the data; `slot` identifies the source inside the config
    /// and selects its sampling stream unless `stream` is given.
    pub fn load(&self, master: SeededRng, slot: u64, base_dir: &Path) -> Result<(Dataset, Option<Partition>)> {
        match self {
            Source::Scenario { scenario, n, params, stream } => {
                let spec = build_scenario(*scenario, params)?.spec;
                let seed = master.derive(Role::Source, stream.unwrap_or(slot));
                let s = sample(&spec, *n, seed)?;
                let truth = s.truth();
                Ok((s.data, Some(truth)))
            }
            Source::Csv { csv, options } => {
                let path = if csv.is_absolute() { csv.clone() } else { base_dir.join(csv) };
                let LoadedCsv { data, truth, .. } = load_csv(&path, options)?;
                Ok((data, truth))
            }
        }
    }

    /// Fresh draw number `replicate` of a scenario source.
    pub fn redraw(&self, master: SeededRng, slot: u64, replicate: u64) -> Result<Dataset> {
        match self {
            Source::Scenario { scenario, n, params, stream } => {
                let spec = build_scenario(*scenario, params)?.spec;
                let seed = master
                    .derive(Role::MonteCarlo, replicate)
                    .derive(Role::Source, stream.unwrap_or(slot));
                Ok(sample(&spec, *n, seed)?.data)
            }
            Source::Csv { .. } => Err(Error::Config(
                "data.*: fresh draws need scenario sources, not CSV files".into(),
            )),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub train: Option<Source>,
    pub test: Option<Source>,
    /// One source split into train and test halves.
    pub split: Option<Source>,
    pub studies: Vec<Source>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BootstrapConfig {
    pub iterations: Option<usize>,
    pub resample: Option<bool>,
}

/// Rectangular 2-D grid of anchors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub resolution: [usize; 2],
}

impl GridSpec {
    pub fn points(&self) -> Result<Dataset> {
        let [nx, ny] = self.resolution;
        if nx == 0 || ny == 0 {
            return Err(Error::Config("grid.resolution entries must be at least 1".into()));
        }
        let coord = |range: [f64; 2], count: usize, i: usize| {
            if count == 1 {
                range[0]
            } else {
                range[0] + (range[1] - range[0]) * i as f64 / (count - 1) as f64
            }
        };
        let rows: Vec<[f64; 2]> = (0..ny)
            .flat_map(|j| (0..nx).map(move |i| (i, j)))
            .map(|(i, j)| [coord(self.x, nx, i), coord(self.y, ny, j)])
            .collect();
        Dataset::from_rows(&rows)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationConfig {
    pub monte_carlo: usize,
    pub alphas: Vec<f64>,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            monte_carlo: 1000,
            alphas: (1..=19).map(|i| i as f64 * 0.05).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    pub perturb: PerturbSpec,
    /// Feature fraction for the feature-subset inclusion score.
    pub alpha: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            perturb: PerturbSpec::default(),
            alpha: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SigtestConfig {
    /// Independent repetitions; each draws a fresh dataset from a scenario source.
    pub repeats: usize,
}

impl Default for SigtestConfig {
    fn default() -> Self {
        Self { repeats: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub data: DataConfig,
    pub algorithm: AlgoConfig,
    /// Several algorithms for sweeps; `algorithm` alone when empty.
    pub algorithms: Vec<AlgoConfig>,
    /// k values to sweep; the algorithm's own `k` when empty.
    pub k: Vec<usize>,
    pub scores: Vec<ScoreKind>,
    pub bootstrap: BootstrapConfig,
    pub anchors: Vec<Vec<f64>>,
    /// Use the training points of this cluster (of the function fit on the
    /// training data) as anchors.
    pub anchor_cluster: Option<usize>,
    pub grid: Option<GridSpec>,
    pub baseline: BaselineConfig,
    pub sigtest: SigtestConfig,
    pub calibration: CalibrationConfig,
    pub svg: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            data: DataConfig::default(),
            algorithm: AlgoConfig::default(),
            algorithms: Vec::new(),
            k: Vec::new(),
            scores: vec![ScoreKind::Ari, ScoreKind::Ami],
            bootstrap: BootstrapConfig::default(),
            anchors: Vec::new(),
            anchor_cluster: None,
            grid: None,
            baseline: BaselineConfig::default(),
            sigtest: SigtestConfig::default(),
            calibration: CalibrationConfig::default(),
            svg: true,
        }
    }
}

impl ExperimentConfig {
    /// Parses a config document. A run manifest is accepted too: its
    /// embedded `config` is used.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("config is not valid JSON: {e}")))?;
        let value = match value.get("config") {
            Some(inner) if value.get("tool").is_some() => inner.clone(),
            _ => value,
        };
        serde_json::from_value(value).map_err(|e| Error::Config(format!("config: {e}")))
    }

    pub fn master(&self) -> SeededRng {
        SeededRng::new(self.seed)
    }

    /// Algorithms to run, each with `k` replaced by every sweep value and
    /// its seed derived from the master seed.
    pub fn algorithm_grid(&self) -> Result<Vec<AlgoConfig>> {
        let algos = if self.algorithms.is_empty() {
            vec![self.algorithm.clone()]
        } else {
            self.algorithms.clone()
        };
        let seed = self.master().derive(Role::Fit, 0);
        let mut out = Vec::new();
        for (i, a) in algos.iter().enumerate() {
            let ks = if self.k.is_empty() { vec![a.k] } else { self.k.clone() };
            for &k in &ks {
                let cfg = a.clone().with_k(k).with_seed(seed);
                cfg.validate().map_err(|e| Error::Config(format!("algorithms[{i}] (k = {k}): {e}")))?;
                out.push(cfg);
            }
        }
        Ok(out)
    }

    pub fn single_algorithm(&self) -> Result<AlgoConfig> {
        let grid = self.algorithm_grid()?;
        if grid.len() != 1 {
            return Err(Error::Config(format!(
                "this command runs one algorithm, but algorithms/k describe {}",
                grid.len()
            )));
        }
        Ok(grid.into_iter().next().expect("length checked"))
    }

    pub fn iterations(&self, command: Command) -> usize {
        self.bootstrap.iterations.unwrap_or(command.default_iterations())
    }

    pub fn validate(&self, command: Command) -> Result<()> {
        if self.scores.is_empty() {
            return Err(Error::Config("scores: at least one score kind is required".into()));
        }
        if self.iterations(command) == 0 {
            return Err(Error::Config("bootstrap.iterations must be at least 1".into()));
        }
        for (i, a) in self.anchors.iter().enumerate() {
            if a.is_empty() || a.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config(format!("anchors[{i}] must be a non-empty finite vector")));
            }
        }
        Ok(())
    }

    /// Training and test data: explicit `train`/`test`, or halves of `split`.
    pub fn train_test(&self, base_dir: &Path) -> Result<(Dataset, Dataset)> {
        let master = self.master();
        match (&self.data.train, &self.data.test, &self.data.split) {
            (Some(tr), Some(te), None) => Ok((tr.load(master, 0, base_dir)?.0, te.load(master, 1, base_dir)?.0)),
            (None, None, Some(src)) => {
                let (x, _) = src.load(master, 0, base_dir)?;
                split_half(&x, master.derive(Role::Split, 0))
            }
            _ => Err(Error::Config(
                "data: give either both `train` and `test`, or `split`".into(),
            )),
        }
    }

    /// A single dataset: `train`, `split` or the first study.
    pub fn single_dataset(&self, base_dir: &Path) -> Result<(Dataset, Option<Partition>)> {
        let master = self.master();
        let src = self
            .data
            .train
            .as_ref()
            .or(self.data.split.as_ref())
            .or(self.data.studies.first())
            .ok_or_else(|| Error::Config("data: no source given (use `train`, `split` or `studies`)".into()))?;
        src.load(master, 0, base_dir)
    }

    pub fn single_source(&self) -> Option<&Source> {
        self.data.train.as_ref().or(self.data.split.as_ref()).or(self.data.studies.first())
    }

    pub fn studies(&self, base_dir: &Path) -> Result<Vec<Dataset>> {
        if self.data.studies.len() < 2 {
            return Err(Error::Config("data.studies: at least two studies are required".into()));
        }
        let master = self.master();
        self.data
            .studies
            .iter()
            .enumerate()
            .map(|(s, src)| src.load(master, s as u64, base_dir).map(|(x, _)| x))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_scenario_and_csv_sources() {
        let cfg = ExperimentConfig::from_json(
            r#"{"seed": 3, "data": {"train": {"scenario": "local_f1", "n": 50},
                "test": {"csv": "x.csv", "has_header": false, "label_column": 2}},
                "algorithm": {"algorithm": "kmeans", "k": 3}, "scores": ["ari"]}"#,
        )
        .unwrap();
        assert!(cfg.data.train.as_ref().unwrap().is_scenario());
        assert!(matches!(cfg.data.test, Some(Source::Csv { .. })));
        assert_eq!(cfg.algorithm.k, 3);
        assert_eq!(cfg.iterations(Command::Calibrate), 1000);
    }

    #[test]
    fn rejects_unknown_fields_and_bad_scenarios() {
        assert!(ExperimentConfig::from_json(r#"{"sed": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"data": {"train": {"scenario": "nope", "n": 5}}}"#).is_err());
    }

    #[test]
    fn manifest_config_is_unwrapped() {
        let cfg = ExperimentConfig::from_json(r#"{"tool": "clurep", "config": {"seed": 9}}"#).unwrap();
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn grid_points_cover_the_rectangle() {
        let g = GridSpec { x: [0.0, 1.0], y: [-1.0, 1.0], resolution: [2, 3] };
        let p = g.points().unwrap();
        assert_eq!(p.n(), 6);
        assert_eq!(p.row(0), &[0.0, -1.0]);
        assert_eq!(p.row(5), &[1.0, 1.0]);
    }

    #[test]
    fn sweep_grid_expands_k() {
        let cfg = ExperimentConfig { k: vec![2, 3, 4], ..Default::default() };
        let grid = cfg.algorithm_grid().unwrap();
        assert_eq!(grid.iter().map(|a| a.k).collect::<Vec<_>>(), vec![2, 3, 4]);
        assert!(cfg.single_algorithm().is_err());
    }
}
