use clurep_core::baselines::{
    hennig_jaccard, igp, mcshane_d_index, mcshane_r_index, prediction_strength, significance_test,
    smolkin_ghosh, stability_mmd, ClusterScore, NullModel, PerturbSpec,
};
use clurep_core::stats::{mean, sample_sd};
use clurep_core::synthdata::split_half;
use clurep_core::{Error, Result, Role};
use serde::Serialize;

use super::Context;
use crate::output::{num, OutputDir, Table};

#[derive(Serialize)]
struct MethodRow {
    method: &'static str,
    /// Cluster index, or `None` for a global score.
    cluster: Option<usize>,
    size: usize,
    value: Option<f64>,
}

pub fn baseline(ctx: &Context, out: &mut OutputDir) -> Result<()> {
    let cfg = &ctx.config;
    let master = cfg.master();
    let (x, _) = cfg.single_dataset(&ctx.base_dir)?;
    let a = cfg.single_algorithm()?;
    let spec = PerturbSpec {
        seed: master.derive(Role::Perturb, 0),
        execution: ctx.execution,
        ..cfg.baseline.perturb.clone()
    };
    let mut rows = Vec::new();
    let mut per_cluster = |method: &'static str, scores: Vec<ClusterScore>| {
        rows.extend(scores.into_iter().map(|c| MethodRow {
            method,
            cluster: Some(c.cluster),
            size: c.size,
            value: c.value,
        }));
    };

    log::info!("baseline: perturbation methods with {} iterations", spec.iterations);
    let mmd = stability_mmd(&a, &x, &spec)?;
    per_cluster("hennig_jaccard", hennig_jaccard(&a, &x, &spec)?);
    per_cluster("mcshane_r", mcshane_r_index(&a, &x, &spec)?);
    per_cluster("mcshane_d", mcshane_d_index(&a, &x, &spec, false)?);
    per_cluster("mcshane_d_relative", mcshane_d_index(&a, &x, &spec, true)?);
    per_cluster(
        "smolkin_ghosh",
        smolkin_ghosh(&a, &x, cfg.baseline.alpha, spec.iterations, master.derive(Role::FeatureSubset, 0), ctx.execution)?,
    );

    let (xtr, xte) = if cfg.data.split.is_some() || cfg.data.test.is_some() {
        cfg.train_test(&ctx.base_dir)?
    } else {
        split_half(&x, master.derive(Role::Split, 0))?
    };
    let ps = prediction_strength(&a, &xtr, &xte, a.k)?;
    per_cluster("prediction_strength", ps.per_cluster.clone());

    let f = a.clone().with_seed(a.seed.derive(Role::Fit, 0)).fit(&x)?;
    let partition = f.partition_of(&x)?;
    let sizes = partition.block_sizes();
    let igp_scores = igp(&x, &partition)?
        .into_iter()
        .enumerate()
        .map(|(cluster, v)| ClusterScore { cluster, size: sizes[cluster], value: Some(v) })
        .collect();
    per_cluster("igp", igp_scores);

    rows.insert(0, MethodRow { method: "stability_mmd", cluster: None, size: x.n(), value: Some(mmd) });
    rows.push(MethodRow { method: "prediction_strength", cluster: None, size: xte.n(), value: Some(ps.value) });

    let mut table = Table::new(&["method", "cluster", "size", "k", "value"]);
    for r in &rows {
        table.push(vec![
            r.method.to_string(),
            r.cluster.map_or_else(|| "all".to_string(), |c| c.to_string()),
            r.size.to_string(),
            a.k.to_string(),
            r.value.map(num).unwrap_or_default(),
        ]);
    }
    out.write_csv("scores.csv", &table)?;
    out.write_json(
        "summary.json",
        &serde_json::json!({
            "seed": cfg.seed,
            "algorithm": a.label(),
            "n": x.n(),
            "noise_variance": spec.resolved_noise_variance(&x),
            "prediction_strength_excluded": ps.excluded,
            "rows": rows,
        }),
    )
}

pub fn sigtest(ctx: &Context, out: &mut OutputDir) -> Result<()> {
    let cfg = &ctx.config;
    let master = cfg.master();
    let repeats = cfg.sigtest.repeats;
    if repeats == 0 {
        return Err(Error::Config("sigtest.repeats must be at least 1".into()));
    }
    let b = cfg.iterations(ctx.command);
    let source = cfg
        .single_source()
        .ok_or_else(|| Error::Config("data: no source given (use `train`, `split` or `studies`)".into()))?;
    if repeats > 1 && !source.is_scenario() {
        return Err(Error::Config("sigtest.repeats > 1 needs a scenario source for fresh draws".into()));
    }
    let mut table = Table::new(&["repeat", "s_star", "p_value", "null_mean", "null_sd", "B"]);
    let mut p_values = Vec::with_capacity(repeats);
    let mut ridges = Vec::with_capacity(repeats);
    for r in 0..repeats {
        let x = if repeats == 1 {
            cfg.single_dataset(&ctx.base_dir)?.0
        } else {
            source.redraw(master, 0, r as u64)?
        };
        let report = significance_test(&x, b, NullModel::GaussianFit, master.derive(Role::NullDraw, r as u64), ctx.execution)?;
        table.push(vec![
            r.to_string(),
            num(report.s_star),
            num(report.p_value),
            num(mean(&report.null_scores)),
            num(sample_sd(&report.null_scores)),
            b.to_string(),
        ]);
        p_values.push(report.p_value);
        ridges.push(report.ridge);
    }
    out.write_csv("scores.csv", &table)?;
    let rejected = p_values.iter().filter(|&&p| p < 0.05).count();
    out.write_json(
        "summary.json",
        &serde_json::json!({
            "seed": cfg.seed,
            "null_model": NullModel::GaussianFit,
            "iterations": b,
            "repeats": repeats,
            "rejected_at_0_05": rejected,
            "fraction_rejected_at_0_05": rejected as f64 / repeats as f64,
            "p_values": p_values,
            "ridges": ridges,
        }),
    )
}
