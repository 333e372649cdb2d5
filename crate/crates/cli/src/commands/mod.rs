//! Command implementations. Each writes `scores.csv`, `summary.json` and
//! optional SVG plots into the output directory.

mod baseline;
mod global;
mod local;

use std::path::PathBuf;

use clurep_core::replicability::{BootstrapPlan, ReplicabilityReport};
use clurep_core::{Execution, Result, Role};
use serde::Serialize;

use crate::config::{Command, ExperimentConfig};
use crate::output::{num, OutputDir};

pub struct Context {
    pub command: Command,
    pub config: ExperimentConfig,
    /// Relative CSV paths resolve against this directory.
    pub base_dir: PathBuf,
    pub execution: Execution,
}

impl Context {
    pub fn plan(&self) -> BootstrapPlan {
        let mut plan = BootstrapPlan::new(
            self.config.iterations(self.command),
            self.config.master().derive(Role::Resample, 0),
        )
        .with_execution(self.execution);
        if self.config.bootstrap.resample == Some(false) {
            plan = plan.without_resampling();
        }
        plan
    }
}

pub fn run(ctx: &Context, out: &mut OutputDir) -> Result<()> {
    ctx.config.validate(ctx.command)?;
    match ctx.command {
        Command::Pairwise => global::pairwise(ctx, out),
        Command::SweepK => global::sweep_k(ctx, out),
        Command::Multistudy => global::multistudy(ctx, out),
        Command::Calibrate => global::calibrate(ctx, out),
        Command::Local => local::local(ctx, out),
        Command::Grid => local::grid(ctx, out),
        Command::Baseline => baseline::baseline(ctx, out),
        Command::Sigtest => baseline::sigtest(ctx, out),
    }
}

/// Summary statistics of one bootstrap distribution as stored in JSON.
#[derive(Serialize)]
pub struct Stats {
    pub mean: f64,
    pub sd: f64,
    pub q05: f64,
    pub q95: f64,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point_estimate: Option<f64>,
    pub degenerate: usize,
}

impl Stats {
    pub fn of(r: &ReplicabilityReport) -> Self {
        Self {
            mean: r.mean(),
            sd: r.sd(),
            q05: r.quantile(0.05),
            q95: r.quantile(0.95),
            iterations: r.scores.len(),
            point_estimate: r.point_estimate,
            degenerate: r.degenerate,
        }
    }

    /// `mean, sd, q05, q95, B` CSV cells.
    pub fn cells(&self) -> Vec<String> {
        vec![num(self.mean), num(self.sd), num(self.q05), num(self.q95), self.iterations.to_string()]
    }
}
