use std::collections::BTreeMap;

use clurep_core::replicability::{algorithm1_multi, cross_study, monte_carlo};
use clurep_core::{Error, Result, ScoreKind};
use serde::Serialize;

use super::{Context, Stats};
use crate::output::{num, OutputDir, Table};
use crate::svg;

pub fn pairwise(ctx: &Context, out: &mut OutputDir) -> Result<()> {
    let cfg = &ctx.config;
    let (xtr, xte) = cfg.train_test(&ctx.base_dir)?;
    let a = cfg.single_algorithm()?;
    let reports = algorithm1_multi(&a, &xtr, &xte, &cfg.scores, &ctx.plan())?;

    let mut table = Table::new(&["score_kind", "iteration", "score"]);
    for r in &reports {
        for (b, s) in r.scores.iter().enumerate() {
            table.push(vec![r.kind.to_string(), b.to_string(), num(*s)]);
        }
    }
    out.write_csv("scores.csv", &table)?;

    #[derive(Serialize)]
    struct Summary {
        seed: u64,
        algorithm: String,
        k: usize,
        n_train: usize,
        n_test: usize,
        scores: BTreeMap<String, Stats>,
    }
    out.write_json(
        "summary.json",
        &Summary {
            seed: cfg.seed,
            algorithm: a.label(),
            k: a.k,
            n_train: xtr.n(),
            n_test: xte.n(),
            scores: reports.iter().map(|r| (r.kind.to_string(), Stats::of(r))).collect(),
        },
    )
}

pub fn sweep_k(ctx: &Context, out: &mut OutputDir) -> Result<()> {
    let cfg = &ctx.config;
    let (xtr, xte) = cfg.train_test(&ctx.base_dir)?;
    let plan = ctx.plan();
    let mut table = Table::new(&["algorithm", "k", "score_kind", "mean", "sd", "q05", "q95", "B"]);
    // (algorithm, kind) -> [(k, stats)]
    let mut curves: BTreeMap<(String, String), Vec<(usize, Stats)>> = BTreeMap::new();
    for a in cfg.algorithm_grid()? {
        log::info!("sweep-k: {}", a.label());
        let reports = algorithm1_multi(&a, &xtr, &xte, &cfg.scores, &plan)?;
        for r in &reports {
            let stats = Stats::of(r);
            let mut row = vec![a.algorithm.name().to_string(), a.k.to_string(), r.kind.to_string()];
            row.extend(stats.cells());
            table.push(row);
            curves
                .entry((a.algorithm.name().to_string(), r.kind.to_string()))
                .or_default()
                .push((a.k, stats));
        }
    }
    out.write_csv("scores.csv", &table)?;

    #[derive(Serialize)]
    struct Curve<'a> {
        algorithm: &'a str,
        score_kind: &'a str,
        argmax_k: usize,
        max_mean: f64,
        points: Vec<CurvePoint<'a>>,
    }
    #[derive(Serialize)]
    struct CurvePoint<'a> {
        k: usize,
        #[serde(flatten)]
        stats: &'a Stats,
    }
    let summary: Vec<Curve> = curves
        .iter()
        .map(|((algorithm, kind), points)| {
            // first k wins ties
            let (argmax_k, max_mean) = points.iter().fold((0, f64::NEG_INFINITY), |best, (k, s)| {
                if s.mean > best.1 {
                    (*k, s.mean)
                } else {
                    best
                }
            });
            Curve {
                algorithm,
                score_kind: kind,
                argmax_k,
                max_mean,
                points: points.iter().map(|(k, stats)| CurvePoint { k: *k, stats }).collect(),
            }
        })
        .collect();
    out.write_json("summary.json", &serde_json::json!({ "seed": cfg.seed, "curves": summary }))?;

    if cfg.svg {
        for kind in &cfg.scores {
            let series: Vec<svg::Series> = curves
                .iter()
                .filter(|((_, k), _)| *k == kind.to_string())
                .map(|((algorithm, _), points)| svg::Series {
                    name: algorithm.clone(),
                    points: points.iter().map(|(k, s)| (*k as f64, s.mean, s.sd)).collect(),
                })
                .collect();
            let chart = svg::line_chart(&format!("Replicability vs k ({kind})"), "k", kind.name(), &series);
            out.write_svg(&format!("sweep_k_{kind}.svg"), &chart)?;
        }
    }
    Ok(())
}

pub fn multistudy(ctx: &Context, out: &mut OutputDir) -> Result<()> {
    let cfg = &ctx.config;
    let studies = cfg.studies(&ctx.base_dir)?;
    let refs: Vec<_> = studies.iter().collect();
    let s_count = studies.len();
    let plan = ctx.plan();
    let mut table = Table::new(&[
        "algorithm", "k", "score_kind", "train", "test", "mean", "sd", "q05", "q95", "B", "diagonal",
    ]);

    #[derive(Serialize)]
    struct Block {
        algorithm: String,
        k: usize,
        score_kind: ScoreKind,
        /// Mean score training on row, testing on column; diagonal set to 1.
        matrix: Vec<Vec<f64>>,
        aggregate: Vec<Aggregate>,
    }
    #[derive(Serialize)]
    struct Aggregate {
        train: usize,
        mean: f64,
        sd: f64,
        q05: f64,
        q95: f64,
    }
    let mut blocks = Vec::new();
    for a in cfg.algorithm_grid()? {
        log::info!("multistudy: {}", a.label());
        let scores = cross_study(&a, &refs, &cfg.scores, &plan)?;
        for &kind in &cfg.scores {
            let mut matrix = vec![vec![1.0; s_count]; s_count];
            for t in 0..s_count {
                for s in 0..s_count {
                    let mut row = vec![a.algorithm.name().to_string(), a.k.to_string(), kind.to_string(), t.to_string(), s.to_string()];
                    if s == t {
                        row.extend(["1", "0", "1", "1"].map(String::from));
                        row.push(plan.iterations.to_string());
                        row.push("true".into());
                    } else {
                        let stats = Stats::of(&scores.report(kind, t, s)?);
                        matrix[t][s] = stats.mean;
                        row.extend(stats.cells());
                        row.push("false".into());
                    }
                    table.push(row);
                }
            }
            let aggregate = (0..s_count)
                .map(|t| {
                    let m = scores.multi_study(kind, t)?;
                    let s = &m.aggregate_summary;
                    Ok(Aggregate { train: t, mean: s.mean, sd: s.sd, q05: s.quantile(0.05), q95: s.quantile(0.95) })
                })
                .collect::<Result<Vec<_>>>()?;
            if cfg.svg {
                let labels: Vec<String> = (0..s_count).map(|s| format!("S{}", s + 1)).collect();
                let chart = svg::heatmap(&format!("{} ({kind}): train row, test column", a.label()), &labels, &matrix, 0.0, 1.0);
                out.write_svg(&format!("heat_{}_k{}_{kind}.svg", a.algorithm.name(), a.k), &chart)?;
            }
            blocks.push(Block { algorithm: a.algorithm.name().to_string(), k: a.k, score_kind: kind, matrix, aggregate });
        }
    }
    out.write_csv("scores.csv", &table)?;
    out.write_json(
        "summary.json",
        &serde_json::json!({ "seed": cfg.seed, "studies": s_count, "blocks": blocks }),
    )
}

pub fn calibrate(ctx: &Context, out: &mut OutputDir) -> Result<()> {
    let cfg = &ctx.config;
    let (train, test) = match (&cfg.data.train, &cfg.data.test) {
        (Some(tr), Some(te)) if tr.is_scenario() && te.is_scenario() => (tr, te),
        _ => {
            return Err(Error::Config(
                "data: calibrate needs scenario sources for both `train` and `test` (fresh draws are required)".into(),
            ))
        }
    };
    let master = cfg.master();
    let (xtr, xte) = cfg.train_test(&ctx.base_dir)?;
    let replicates = cfg.calibration.monte_carlo;
    let alphas = &cfg.calibration.alphas;
    if let Some(a) = alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::Config(format!("calibration.alphas: {a} is outside [0, 1]")));
    }
    let plan = ctx.plan();
    let mut table = Table::new(&["k", "score_kind", "statistic", "bootstrap", "monte_carlo", "abs_diff"]);
    let mut qq: BTreeMap<ScoreKind, Vec<(String, Vec<(f64, f64)>)>> = BTreeMap::new();

    #[derive(Serialize)]
    struct Row {
        k: usize,
        score_kind: ScoreKind,
        bootstrap_mean: f64,
        monte_carlo_mean: f64,
        abs_diff_mean: f64,
        max_abs_diff_quantile: f64,
    }
    let mut rows = Vec::new();
    for a in cfg.algorithm_grid()? {
        log::info!("calibrate: {}", a.label());
        let boot = algorithm1_multi(&a, &xtr, &xte, &cfg.scores, &plan)?;
        let mc = monte_carlo(
            &a,
            |r| Ok((train.redraw(master, 0, r as u64)?, test.redraw(master, 1, r as u64)?)),
            replicates,
            &cfg.scores,
            ctx.execution,
        )?;
        for (b, m) in boot.iter().zip(&mc) {
            let mut push = |stat: String, x: f64, y: f64| {
                table.push(vec![a.k.to_string(), b.kind.to_string(), stat, num(x), num(y), num((x - y).abs())]);
            };
            push("mean".into(), b.mean(), m.mean());
            push("sd".into(), b.sd(), m.sd());
            let mut pairs = Vec::new();
            let mut worst: f64 = 0.0;
            for &alpha in alphas {
                let (x, y) = (b.quantile(alpha), m.quantile(alpha));
                push(format!("q{alpha}"), x, y);
                pairs.push((y, x));
                worst = worst.max((x - y).abs());
            }
            qq.entry(b.kind).or_default().push((format!("k={}", a.k), pairs));
            rows.push(Row {
                k: a.k,
                score_kind: b.kind,
                bootstrap_mean: b.mean(),
                monte_carlo_mean: m.mean(),
                abs_diff_mean: (b.mean() - m.mean()).abs(),
                max_abs_diff_quantile: worst,
            });
        }
    }
    out.write_csv("scores.csv", &table)?;
    out.write_json(
        "summary.json",
        &serde_json::json!({
            "seed": cfg.seed,
            "bootstrap_iterations": plan.iterations,
            "monte_carlo_replicates": replicates,
            "rows": rows,
        }),
    )?;
    if cfg.svg {
        for (kind, series) in &qq {
            let chart = svg::qq_plot(
                &format!("Bootstrap vs Monte-Carlo quantiles ({kind})"),
                "Monte-Carlo quantile",
                "bootstrap quantile",
                series,
            );
            out.write_svg(&format!("calibration_{kind}.svg"), &chart)?;
        }
    }
    Ok(())
}
