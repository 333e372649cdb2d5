//! Summaries of score samples.

use serde::{Deserialize, Serialize};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (divisor `n − 1`); zero for a single value.
pub fn sample_sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let mu = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - mu) * (x - mu)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

/// Linear-interpolation quantile of already sorted data (Hyndman–Fan type 7).
pub fn quantile_sorted(sorted: &[f64], alpha: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let alpha = alpha.clamp(0.0, 1.0);
    let h = (sorted.len() - 1) as f64 * alpha;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn quantile(xs: &[f64], alpha: f64) -> f64 {
    quantile_sorted(&sorted(xs), alpha)
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Mean, standard deviation and order statistics of a score sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
    #[serde(skip)]
    sorted: Vec<f64>,
}

impl Summary {
    pub fn new(xs: &[f64]) -> Self {
        let sorted = sorted(xs);
        Self {
            n: xs.len(),
            mean: mean(xs),
            sd: sample_sd(xs),
            min: sorted.first().copied().unwrap_or(f64::NAN),
            max: sorted.last().copied().unwrap_or(f64::NAN),
            sorted,
        }
    }

    pub fn quantile(&self, alpha: f64) -> f64 {
        quantile_sorted(&self.sorted, alpha)
    }

    /// Central percentile interval `[q(α/2), q(1 − α/2)]`.
    pub fn percentile_interval(&self, alpha: f64) -> (f64, f64) {
        (self.quantile(alpha / 2.0), self.quantile(1.0 - alpha / 2.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_values() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), 2.5);
        assert!((sample_sd(&xs) - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(quantile(&xs, 0.5), 2.5);
        assert_eq!(quantile(&xs, 0.0), 1.0);
        assert_eq!(quantile(&xs, 1.0), 4.0);
        // numpy.quantile([1,2,3,4], 0.1) = 1.3
        assert!((quantile(&xs, 0.1) - 1.3).abs() < 1e-12);
        assert_eq!(sample_sd(&[7.0]), 0.0);
        assert!(mean(&[]).is_nan());
    }

    proptest! {
        #[test]
        fn quantile_monotone(xs in prop::collection::vec(-1.0f64..1.0, 1..50), a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let s = Summary::new(&xs);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(s.quantile(lo) <= s.quantile(hi));
            prop_assert!(s.min <= s.mean + 1e-12 && s.mean <= s.max + 1e-12);
        }
    }
}
