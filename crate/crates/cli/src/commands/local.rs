use clurep_core::replicability::{local_scores, LocalScores};
use clurep_core::stats::{mean, sample_sd, Summary};
use clurep_core::{Dataset, Error, Result, Role};
use serde::Serialize;

use super::Context;
use crate::output::{num, point, OutputDir, Table};
use crate::svg;

/// Explicit anchors followed by the training points of `anchor_cluster`.
/// Returns the anchors and how many of them are explicit.
fn collect_anchors(ctx: &Context, xtr: &Dataset) -> Result<(Dataset, usize)> {
    let cfg = &ctx.config;
    let mut rows: Vec<Vec<f64>> = cfg.anchors.clone();
    let explicit = rows.len();
    if let Some(c) = cfg.anchor_cluster {
        let a = cfg.single_algorithm()?;
        let f = a.clone().with_seed(a.seed.derive(Role::Fit, 0)).fit(xtr)?;
        let labels = f.labels_of(xtr)?;
        let before = rows.len();
        rows.extend(xtr.rows().zip(&labels).filter(|(_, &l)| l == c).map(|(r, _)| r.to_vec()));
        if rows.len() == before {
            return Err(Error::Config(format!(
                "anchor_cluster: cluster {c} of the training fit is empty (k = {})",
                f.k()
            )));
        }
    }
    if rows.is_empty() {
        return Err(Error::Config("anchors: give `anchors` and/or `anchor_cluster`".into()));
    }
    Ok((Dataset::from_rows(&rows)?, explicit))
}

pub fn local(ctx: &Context, out: &mut OutputDir) -> Result<()> {
    let cfg = &ctx.config;
    let (xtr, xte) = cfg.train_test(&ctx.base_dir)?;
    let a = cfg.single_algorithm()?;
    let (anchors, explicit) = collect_anchors(ctx, &xtr)?;
    let plan = ctx.plan();

    let mut table = Table::new(&["score_kind", "anchor", "point", "mean", "sd", "q05", "q95", "B"]);
    #[derive(Serialize)]
    struct AnchorRow {
        score_kind: String,
        anchor: String,
        point: Vec<f64>,
        mean: f64,
        sd: f64,
        q05: f64,
        q95: f64,
        point_estimate: f64,
    }
    let mut summary = Vec::new();
    for &kind in &cfg.scores {
        let local = local_scores(&a, &xtr, &xte, &anchors, kind, &plan)?;
        let mut emit = |name: String, pt: Vec<f64>, scores: &[f64], point_estimate: f64| {
            let s = Summary::new(scores);
            table.push(vec![
                kind.to_string(),
                name.clone(),
                point(&pt),
                num(s.mean),
                num(s.sd),
                num(s.quantile(0.05)),
                num(s.quantile(0.95)),
                scores.len().to_string(),
            ]);
            summary.push(AnchorRow {
                score_kind: kind.to_string(),
                anchor: name,
                point: pt,
                mean: s.mean,
                sd: s.sd,
                q05: s.quantile(0.05),
                q95: s.quantile(0.95),
                point_estimate,
            });
        };
        for g in 0..anchors.n() {
            emit(g.to_string(), anchors.row(g).to_vec(), local.scores(g), local.point_estimates[g]);
        }
        if let Some(c) = cfg.anchor_cluster {
            let (scores, pe) = cluster_average(&local, explicit);
            emit(format!("cluster{c}"), Vec::new(), &scores, pe);
        }
    }
    out.write_csv("scores.csv", &table)?;
    out.write_json(
        "summary.json",
        &serde_json::json!({
            "seed": cfg.seed,
            "algorithm": a.label(),
            "explicit_anchors": explicit,
            "cluster_anchors": anchors.n() - explicit,
            "anchors": summary,
        }),
    )
}

/// Per-iteration mean over the anchors from `first` onward.
fn cluster_average(local: &LocalScores, first: usize) -> (Vec<f64>, f64) {
    let members: Vec<usize> = (first..local.anchors()).collect();
    let g = members.len() as f64;
    let scores = (0..local.iterations)
        .map(|b| members.iter().map(|&i| local.scores(i)[b]).sum::<f64>() / g)
        .collect();
    let pe = members.iter().map(|&i| local.point_estimates[i]).sum::<f64>() / g;
    (scores, pe)
}

pub fn grid(ctx: &Context, out: &mut OutputDir) -> Result<()> {
    let cfg = &ctx.config;
    let (xtr, xte) = cfg.train_test(&ctx.base_dir)?;
    let a = cfg.single_algorithm()?;
    if cfg.svg && xtr.p() != 2 {
        return Err(Error::Config(format!(
            "grid: the SVG raster needs 2-D data but p = {}; set `svg` to false for CSV output only",
            xtr.p()
        )));
    }
    let points = match (&cfg.grid, cfg.anchors.is_empty()) {
        (Some(g), _) => g.points()?,
        (None, false) => Dataset::from_rows(&cfg.anchors)?,
        (None, true) => return Err(Error::Config("grid: give a `grid` spec or explicit `anchors`".into())),
    };
    let plan = ctx.plan();
    let mut table = Table::new(&["score_kind", "index", "point", "mean", "sd"]);
    let mut fields = Vec::new();
    for &kind in &cfg.scores {
        let local = local_scores(&a, &xtr, &xte, &points, kind, &plan)?;
        let means: Vec<f64> = (0..points.n()).map(|g| mean(local.scores(g))).collect();
        for g in 0..points.n() {
            table.push(vec![
                kind.to_string(),
                g.to_string(),
                point(points.row(g)),
                num(means[g]),
                num(sample_sd(local.scores(g))),
            ]);
        }
        if cfg.svg {
            if let Some(spec) = &cfg.grid {
                let [nx, ny] = spec.resolution;
                let chart = svg::raster(
                    &format!("Local replicability ({kind}), {}", a.label()),
                    spec.x,
                    spec.y,
                    nx,
                    ny,
                    &means,
                    0.0,
                    1.0,
                );
                out.write_svg(&format!("grid_{kind}.svg"), &chart)?;
            }
        }
        let finite: Vec<f64> = means.iter().copied().filter(|m| m.is_finite()).collect();
        fields.push(serde_json::json!({
            "score_kind": kind,
            "points": points.n(),
            "mean_of_means": mean(&finite),
            "min_mean": finite.iter().copied().fold(f64::INFINITY, f64::min),
            "max_mean": finite.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }));
    }
    out.write_csv("scores.csv", &table)?;
    out.write_json(
        "summary.json",
        &serde_json::json!({
            "seed": cfg.seed,
            "algorithm": a.label(),
            "iterations": plan.iterations,
            "grid": cfg.grid,
            "fields": fields,
        }),
    )
}
