use super::{check_kind, check_kinds, check_same_p, BootstrapPlan, MultiStudyReport, ReplicabilityReport};
use crate::algos::AlgoConfig;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::function::ClusteringFunction;
use crate::metrics::{adjusted_of, ContingencyTable, ScoreKind};
use crate::rng::Role;
use crate::stats::Summary;

/// `A` with the fit seed used by iteration (or replicate) `b`.
pub(crate) fn fit_config(a: &AlgoConfig, b: usize) -> AlgoConfig {
    a.clone().with_seed(a.seed.derive(Role::Fit, b as u64))
}

/// Adjusted scores of `f_train` against `f_test` on `x_test`, one per kind,
/// as `(value, degenerate)`.
pub(crate) fn score_functions(
    f_train: &ClusteringFunction,
    f_test: &ClusteringFunction,
    x_test: &Dataset,
    kinds: &[ScoreKind],
) -> Result<Vec<(f64, bool)>> {
    let lt = f_train.labels_of(x_test)?;
    let ls = f_test.labels_of(x_test)?;
    score_labels(&lt, f_train.k(), &ls, f_test.k(), kinds)
}

fn score_labels(
    lt: &[usize],
    kt: usize,
    ls: &[usize],
    ks: usize,
    kinds: &[ScoreKind],
) -> Result<Vec<(f64, bool)>> {
    let table = ContingencyTable::from_label_slices(lt, kt, ls, ks);
    kinds
        .iter()
        .map(|&kind| adjusted_of(kind, &table).map(|s| (s.value, s.degenerate)))
        .collect()
}

/// Point estimate of the replicability index: fit on `xtr` and on `xte`
/// (both with the iteration-0 fit seed) and compare the induced partitions of `xte`.
pub fn point_estimate_r(a: &AlgoConfig, xtr: &Dataset, xte: &Dataset, kind: ScoreKind) -> Result<f64> {
    check_kind(kind)?;
    Ok(point_estimates(a, xtr, xte, &[kind])?[0].0)
}

fn point_estimates(
    a: &AlgoConfig,
    xtr: &Dataset,
    xte: &Dataset,
    kinds: &[ScoreKind],
) -> Result<Vec<(f64, bool)>> {
    check_same_p(&[xtr, xte])?;
    let cfg = fit_config(a, 0);
    let f_tr = cfg.fit(xtr)?;
    let f_te = cfg.fit(xte)?;
    score_functions(&f_tr, &f_te, xte, kinds)
}

/// Scores for every ordered (train, test) pair of studies and every kind.
#[derive(Clone, Debug)]
pub struct CrossStudyScores {
    pub kinds: Vec<ScoreKind>,
    pub studies: usize,
    pub iterations: usize,
    /// Indexed `[kind][train][test][iteration]`; diagonal entries are NaN.
    values: Vec<f64>,
    degenerate: Vec<usize>,
}

impl CrossStudyScores {
    fn offset(&self, kind: usize, t: usize, s: usize) -> usize {
        ((kind * self.studies + t) * self.studies + s) * self.iterations
    }

    fn kind_index(&self, kind: ScoreKind) -> Result<usize> {
        self.kinds
            .iter()
            .position(|&k| k == kind)
            .ok_or_else(|| Error::Config(format!("score kind `{kind}` was not computed")))
    }

    /// Per-iteration scores training on `t` and testing on `s`.
    pub fn scores(&self, kind: ScoreKind, t: usize, s: usize) -> Result<&[f64]> {
        let ki = self.kind_index(kind)?;
        if t == s || t >= self.studies || s >= self.studies {
            return Err(Error::Config(format!("no scores for train {t}, test {s}")));
        }
        let o = self.offset(ki, t, s);
        Ok(&self.values[o..o + self.iterations])
    }

    pub fn report(&self, kind: ScoreKind, t: usize, s: usize) -> Result<ReplicabilityReport> {
        let ki = self.kind_index(kind)?;
        let scores = self.scores(kind, t, s)?.to_vec();
        let degenerate = self.degenerate[(ki * self.studies + t) * self.studies + s];
        Ok(ReplicabilityReport::new(kind, scores, None, degenerate))
    }

    /// Training study `t` against all others, with the per-iteration average.
    pub fn multi_study(&self, kind: ScoreKind, t: usize) -> Result<MultiStudyReport> {
        if t >= self.studies {
            return Err(Error::Config(format!("train index {t} out of range")));
        }
        let per_study = (0..self.studies)
            .filter(|&s| s != t)
            .map(|s| Ok((s, self.report(kind, t, s)?)))
            .collect::<Result<Vec<_>>>()?;
        let denom = per_study.len() as f64;
        let aggregate: Vec<f64> = (0..self.iterations)
            .map(|b| per_study.iter().map(|(_, r)| r.scores[b]).sum::<f64>() / denom)
            .collect();
        let aggregate_summary = Summary::new(&aggregate);
        Ok(MultiStudyReport {
            train: t,
            per_study,
            aggregate,
            aggregate_summary,
        })
    }

    /// `S × S` matrix of mean scores; the diagonal is NaN.
    pub fn mean_matrix(&self, kind: ScoreKind) -> Result<Vec<Vec<f64>>> {
        (0..self.studies)
            .map(|t| {
                (0..self.studies)
                    .map(|s| {
                        if s == t {
                            Ok(f64::NAN)
                        } else {
                            Ok(crate::stats::mean(self.scores(kind, t, s)?))
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Bootstrap over all studies at once: each iteration resamples every study,
/// fits one function per study and scores every ordered pair in `pairs`
/// (all pairs when `None`).
fn bootstrap_pairs(
    a: &AlgoConfig,
    studies: &[&Dataset],
    pairs: Option<&[(usize, usize)]>,
    kinds: &[ScoreKind],
    plan: &BootstrapPlan,
) -> Result<CrossStudyScores> {
    plan.validate()?;
    check_kinds(kinds)?;
    check_same_p(studies)?;
    let s_count = studies.len();
    let all: Vec<(usize, usize)>;
    let pairs = match pairs {
        Some(p) => p,
        None => {
            all = (0..s_count)
                .flat_map(|t| (0..s_count).filter(move |&s| s != t).map(move |s| (t, s)))
                .collect();
            &all
        }
    };
    let mut needed = vec![false; s_count];
    for &(t, s) in pairs {
        needed[t] = true;
        needed[s] = true;
    }

    let per_iteration = map_indexed(plan.iterations, plan.execution, |b| {
        let draws = (0..s_count)
            .map(|s| if needed[s] { plan.draw(studies[s], b, s).map(Some) } else { Ok(None) })
            .collect::<Result<Vec<_>>>()?;
        let cfg = fit_config(a, b);
        let fits = draws
            .iter()
            .map(|d| d.as_ref().map(|d| cfg.fit(d)).transpose())
            .collect::<Result<Vec<_>>>()?;
        let mut self_labels: Vec<Option<Vec<usize>>> = vec![None; s_count];
        let mut out = Vec::with_capacity(pairs.len());
        for &(t, s) in pairs {
            let (xs, fs, ft) = match (&draws[s], &fits[s], &fits[t]) {
                (Some(x), Some(fs), Some(ft)) => (x, fs, ft),
                _ => unreachable!("marked as needed"),
            };
            if self_labels[s].is_none() {
                self_labels[s] = Some(fs.labels_of(xs)?);
            }
            let ls = self_labels[s].as_deref().expect("filled above");
            let lt = ft.labels_of(xs)?;
            out.push(score_labels(&lt, ft.k(), ls, fs.k(), kinds)?);
        }
        Ok(out)
    })?;

    let n_iter = plan.iterations;
    let mut values = vec![f64::NAN; kinds.len() * s_count * s_count * n_iter];
    let mut degenerate = vec![0usize; kinds.len() * s_count * s_count];
    for (b, scores) in per_iteration.iter().enumerate() {
        for (&(t, s), per_kind) in pairs.iter().zip(scores) {
            for (ki, &(value, deg)) in per_kind.iter().enumerate() {
                let cell = (ki * s_count + t) * s_count + s;
                values[cell * n_iter + b] = value;
                degenerate[cell] += deg as usize;
            }
        }
    }
    Ok(CrossStudyScores {
        kinds: kinds.to_vec(),
        studies: s_count,
        iterations: n_iter,
        values,
        degenerate,
    })
}

/// Bootstrap scores for every ordered pair of distinct studies.
pub fn cross_study(
    a: &AlgoConfig,
    studies: &[&Dataset],
    kinds: &[ScoreKind],
    plan: &BootstrapPlan,
) -> Result<CrossStudyScores> {
    if studies.len() < 2 {
        return Err(Error::Config("at least two studies are required".into()));
    }
    bootstrap_pairs(a, studies, None, kinds, plan)
}

/// Bootstrap distribution of the replicability index of `xtr` on `xte`.
pub fn algorithm1(
    a: &AlgoConfig,
    xtr: &Dataset,
    xte: &Dataset,
    kind: ScoreKind,
    plan: &BootstrapPlan,
) -> Result<ReplicabilityReport> {
    Ok(algorithm1_multi(a, xtr, xte, &[kind], plan)?.remove(0))
}

/// [`algorithm1`] for several score kinds sharing the same fitted functions.
pub fn algorithm1_multi(
    a: &AlgoConfig,
    xtr: &Dataset,
    xte: &Dataset,
    kinds: &[ScoreKind],
    plan: &BootstrapPlan,
) -> Result<Vec<ReplicabilityReport>> {
    let scores = bootstrap_pairs(a, &[xtr, xte], Some(&[(0, 1)]), kinds, plan)?;
    let points = point_estimates(a, xtr, xte, kinds)?;
    kinds
        .iter()
        .zip(points)
        .map(|(&kind, (point, _))| {
            let mut r = scores.report(kind, 0, 1)?;
            r.point_estimate = Some(point);
            Ok(r)
        })
        .collect()
}

/// Average replicability of training study `t` across all other studies.
pub fn algorithm2(
    a: &AlgoConfig,
    studies: &[&Dataset],
    t: usize,
    kind: ScoreKind,
    plan: &BootstrapPlan,
) -> Result<MultiStudyReport> {
    if studies.len() < 2 {
        return Err(Error::Config("at least two studies are required".into()));
    }
    if t >= studies.len() {
        return Err(Error::Config(format!("train index {t} out of range")));
    }
    let pairs: Vec<(usize, usize)> = (0..studies.len()).filter(|&s| s != t).map(|s| (t, s)).collect();
    bootstrap_pairs(a, studies, Some(&pairs), &[kind], plan)?.multi_study(kind, t)
}

/// Monte-Carlo distribution of the point estimate: replicate `r` scores a
/// fresh pair `draw(r)` with fit seed `A.seed.derive(Fit, r)`.
pub fn monte_carlo<F>(
    a: &AlgoConfig,
    draw: F,
    replicates: usize,
    kinds: &[ScoreKind],
    execution: Execution,
) -> Result<Vec<ReplicabilityReport>>
where
    F: Fn(usize) -> Result<(Dataset, Dataset)> + Sync + Send,
{
    check_kinds(kinds)?;
    if replicates == 0 {
        return Err(Error::Config("Monte-Carlo replicates must be at least 1".into()));
    }
    let per_rep = map_indexed(replicates, execution, |r| {
        let (xtr, xte) = draw(r)?;
        check_same_p(&[&xtr, &xte])?;
        let cfg = fit_config(a, r);
        let f_tr = cfg.fit(&xtr)?;
        let f_te = cfg.fit(&xte)?;
        score_functions(&f_tr, &f_te, &xte, kinds)
    })?;
    Ok(kinds
        .iter()
        .enumerate()
        .map(|(ki, &kind)| {
            let scores: Vec<f64> = per_rep.iter().map(|v| v[ki].0).collect();
            let degenerate = per_rep.iter().filter(|v| v[ki].1).count();
            ReplicabilityReport::new(kind, scores, None, degenerate)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    fn blobs(seed: u64, n_per: usize) -> Dataset {
        use rand_distr::{Distribution, Normal};
        let mut rng = SeededRng::new(seed).rng();
        let noise = Normal::new(0.0, 0.3).unwrap();
        let centres = [(0.0, 0.0), (6.0, 0.0), (0.0, 6.0), (6.0, 6.0)];
        let mut rows = Vec::new();
        for _ in 0..n_per {
            for &(cx, cy) in &centres {
                rows.push(vec![cx + noise.sample(&mut rng), cy + noise.sample(&mut rng)]);
            }
        }
        Dataset::from_rows(&rows).unwrap()
    }

    #[test]
    fn identical_data_without_resampling_scores_one() {
        let x = blobs(1, 20);
        let a = AlgoConfig::kmeans(3);
        let plan = BootstrapPlan::new(3, SeededRng::new(5)).without_resampling();
        for kind in [ScoreKind::Ari, ScoreKind::Ami] {
            let r = algorithm1(&a, &x, &x, kind, &plan).unwrap();
            assert!(r.scores.iter().all(|&s| s == 1.0));
            assert_eq!(r.point_estimate, Some(1.0));
        }
        let m = algorithm2(&a, &[&x, &x, &x], 1, ScoreKind::Ari, &plan).unwrap();
        assert!(m.aggregate.iter().all(|&s| s == 1.0));
    }

    #[test]
    fn single_unresampled_iteration_equals_point_estimate() {
        let (xtr, xte) = (blobs(1, 15), blobs(2, 15));
        let a = AlgoConfig::kmeans(5);
        let plan = BootstrapPlan::new(1, SeededRng::new(9)).without_resampling();
        let r = algorithm1(&a, &xtr, &xte, ScoreKind::Ari, &plan).unwrap();
        assert_eq!(r.scores[0], point_estimate_r(&a, &xtr, &xte, ScoreKind::Ari).unwrap());
    }

    #[test]
    fn two_studies_match_algorithm1() {
        let (xtr, xte) = (blobs(3, 15), blobs(4, 15));
        let a = AlgoConfig::kmeans(4);
        let plan = BootstrapPlan::new(6, SeededRng::new(11));
        let one = algorithm1(&a, &xtr, &xte, ScoreKind::Ami, &plan).unwrap();
        let two = algorithm2(&a, &[&xtr, &xte], 0, ScoreKind::Ami, &plan).unwrap();
        assert_eq!(one.scores, two.aggregate);
    }

    #[test]
    fn aggregate_is_mean_of_per_study() {
        let studies: Vec<Dataset> = (0..4).map(|s| blobs(10 + s, 10)).collect();
        let refs: Vec<&Dataset> = studies.iter().collect();
        let plan = BootstrapPlan::new(5, SeededRng::new(2));
        let cs = cross_study(&AlgoConfig::kmeans(4), &refs, &[ScoreKind::Ari], &plan).unwrap();
        let m = cs.multi_study(ScoreKind::Ari, 2).unwrap();
        for b in 0..5 {
            let avg = m.per_study.iter().map(|(_, r)| r.scores[b]).sum::<f64>() / 3.0;
            assert_eq!(m.aggregate[b], avg);
        }
        let direct = algorithm2(&AlgoConfig::kmeans(4), &refs, 2, ScoreKind::Ari, &plan).unwrap();
        assert_eq!(direct.aggregate, m.aggregate);
        assert!(cs.mean_matrix(ScoreKind::Ari).unwrap()[1][1].is_nan());
    }

    #[test]
    fn same_distribution_scores_high() {
        let (xtr, xte) = (blobs(21, 40), blobs(22, 40));
        let r = algorithm1(
            &AlgoConfig::kmeans(4),
            &xtr,
            &xte,
            ScoreKind::Ari,
            &BootstrapPlan::new(10, SeededRng::new(1)),
        )
        .unwrap();
        assert!(r.mean() > 0.9, "{}", r.mean());
        assert!(r.scores.iter().all(|&s| s <= 1.0));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let (xtr, xte) = (blobs(5, 12), blobs(6, 12));
        let a = AlgoConfig::kmeans(3);
        let plan = BootstrapPlan::new(8, SeededRng::new(3));
        let par = algorithm1(&a, &xtr, &xte, ScoreKind::Ari, &plan).unwrap();
        let seq = algorithm1(&a, &xtr, &xte, ScoreKind::Ari, &plan.with_execution(Execution::Sequential)).unwrap();
        assert_eq!(par.scores, seq.scores);
    }

    #[test]
    fn rejects_unadjusted_kinds_and_single_study() {
        let x = blobs(1, 5);
        let plan = BootstrapPlan::new(2, SeededRng::new(0));
        assert!(algorithm1(&AlgoConfig::kmeans(2), &x, &x, ScoreKind::Ri, &plan).is_err());
        assert!(algorithm2(&AlgoConfig::kmeans(2), &[&x], 0, ScoreKind::Ari, &plan).is_err());
    }

    #[test]
    fn monte_carlo_draws_fresh_pairs() {
        let a = AlgoConfig::kmeans(4);
        let r = monte_carlo(
            &a,
            |r| Ok((blobs(100 + 2 * r as u64, 10), blobs(101 + 2 * r as u64, 10))),
            4,
            &[ScoreKind::Ari, ScoreKind::Ami],
            Execution::Auto,
        )
        .unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].scores.len(), 4);
    }
}
