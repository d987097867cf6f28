//! Empirical error bounds over repeated trials and their CDFs across datasets.

use serde::{Deserialize, Serialize};

use crate::{Error, PredictionPair, Result, TrialOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    P25,
    P75,
}

impl Which {
    pub fn of(&self, p: &PredictionPair) -> f64 {
        match self {
            Self::P25 => p.p25,
            Self::P75 => p.p75,
        }
    }
}

/// What errors are measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reference {
    Ols,
    Truth,
}

/// All trials of one algorithm on one dataset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub dataset_id: String,
    pub algorithm: String,
    pub trials: Vec<TrialOutcome>,
    pub ols_baseline: PredictionPair,
    /// OLS standard errors at 0.25 and 0.75.
    pub sigma_hat: (f64, f64),
    pub truth: Option<PredictionPair>,
}

impl TrialReport {
    pub fn sigma(&self, which: Which) -> f64 {
        match which {
            Which::P25 => self.sigma_hat.0,
            Which::P75 => self.sigma_hat.1,
        }
    }

    pub fn failure_rate(&self) -> f64 {
        let failed = self.trials.iter().filter(|t| t.is_failure()).count();
        failed as f64 / self.trials.len().max(1) as f64
    }

    fn reference(&self, vs: Reference) -> Result<PredictionPair> {
        match vs {
            Reference::Ols => Ok(self.ols_baseline),
            Reference::Truth => self.truth.ok_or_else(|| {
                Error::InvalidParameter(format!("dataset {} has no ground truth", self.dataset_id))
            }),
        }
    }

    /// Absolute error of every trial, with failures as `+inf`.
    pub fn abs_errors(&self, which: Which, vs: Reference) -> Result<Vec<f64>> {
        let reference = which.of(&self.reference(vs)?);
        Ok(self
            .trials
            .iter()
            .map(|t| match t.prediction() {
                Some(p) => (which.of(&p) - reference).abs(),
                None => f64::INFINITY,
            })
            .collect())
    }
}

/// Smallest `c` such that at least `q`% of trials err by at most `c`.
///
/// Failed trials never satisfy a bound, so the result is `+inf` when too many
/// trials failed.
pub fn empirical_error_bound(r: &TrialReport, q: f64, which: Which, vs: Reference) -> Result<f64> {
    bound_from_errors(r.abs_errors(which, vs)?, q)
}

/// [`empirical_error_bound`] over raw absolute errors, `+inf` marking failures.
pub fn bound_from_errors(mut errors: Vec<f64>, q: f64) -> Result<f64> {
    if !(0.0..=100.0).contains(&q) {
        return Err(Error::InvalidParameter(format!("q must be in [0, 100], got {q}")));
    }
    if errors.is_empty() {
        return Err(Error::EmptyInput);
    }
    if q == 0.0 {
        return Ok(0.0);
    }
    if errors.iter().all(|e| *e == f64::INFINITY) {
        return Err(Error::AllFailures);
    }
    errors.sort_by(f64::total_cmp);
    Ok(errors[order_statistic(q, errors.len()) - 1])
}

/// 1-based rank `ceil(q% of total)`, tolerant of `q * total / 100` landing a
/// rounding error above an integer.
fn order_statistic(q: f64, total: usize) -> usize {
    ((q * total as f64 / 100.0 - 1e-9).ceil() as usize).clamp(1, total)
}

/// Sorted ratios `C(q) / sigma` with their empirical CDF ordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioCdf {
    pub points: Vec<(f64, f64)>,
    /// Datasets skipped for a zero standard error.
    pub excluded: Vec<String>,
}

impl RatioCdf {
    /// Fraction of datasets whose ratio is at most `x`.
    pub fn at(&self, x: f64) -> f64 {
        let below = self.points.partition_point(|&(r, _)| r <= x);
        below as f64 / self.points.len().max(1) as f64
    }

    pub fn median(&self) -> Option<f64> {
        crate::estimators::median(&self.points.iter().map(|p| p.0).collect::<Vec<_>>())
    }
}

pub fn ratio_cdf(reports: &[TrialReport], q: f64, which: Which, vs: Reference) -> Result<RatioCdf> {
    let mut ratios = Vec::with_capacity(reports.len());
    let mut excluded = Vec::new();
    for r in reports {
        let sigma = r.sigma(which);
        if !(sigma > 0.0) {
            excluded.push(r.dataset_id.clone());
            continue;
        }
        let bound = match empirical_error_bound(r, q, which, vs) {
            Err(Error::AllFailures) => f64::INFINITY,
            other => other?,
        };
        ratios.push(bound / sigma);
    }
    ratios.sort_by(f64::total_cmp);
    let total = ratios.len() as f64;
    let points = ratios
        .into_iter()
        .enumerate()
        .map(|(i, r)| (r, (i + 1) as f64 / total))
        .collect();
    Ok(RatioCdf { points, excluded })
}

/// Empirical CDF of raw released values, with failures dropped.
pub fn output_cdf(trials: &[TrialOutcome], which: Which) -> Vec<(f64, f64)> {
    let mut values: Vec<f64> = trials.iter().filter_map(|t| t.prediction()).map(|p| which.of(&p)).collect();
    values.sort_by(f64::total_cmp);
    let total = values.len() as f64;
    values.into_iter().enumerate().map(|(i, v)| (v, (i + 1) as f64 / total)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn report(p25s: &[Option<f64>], sigma: f64) -> TrialReport {
        TrialReport {
            dataset_id: "d".into(),
            algorithm: "a".into(),
            trials: p25s
                .iter()
                .map(|v| match v {
                    Some(v) => TrialOutcome::Released(PredictionPair::new(*v, 0.0)),
                    None => TrialOutcome::Failed,
                })
                .collect(),
            ols_baseline: PredictionPair::new(0.0, 0.0),
            sigma_hat: (sigma, sigma),
            truth: None,
        }
    }

    fn bound(r: &TrialReport, q: f64) -> Result<f64> {
        empirical_error_bound(r, q, Which::P25, Reference::Ols)
    }

    #[test]
    fn zero_error() {
        let r = report(&[Some(0.0); 7], 1.0);
        for q in [0.0, 10.0, 68.0, 100.0] {
            assert_eq!(bound(&r, q).unwrap(), 0.0);
        }
    }

    #[test]
    fn hand_computed_order_statistic() {
        let r = report(&[Some(0.4), Some(-0.1), Some(0.3), Some(0.2)], 1.0);
        assert_eq!(bound(&r, 68.0).unwrap(), 0.3);
        assert_eq!(bound(&r, 75.0).unwrap(), 0.3);
        assert_eq!(bound(&r, 100.0).unwrap(), 0.4);
        assert_eq!(bound(&r, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn failures_count_as_infinite() {
        // 30 of 100 fail: 68% is still reachable.
        let mut v: Vec<Option<f64>> = (0..70).map(|i| Some(i as f64 / 100.0)).collect();
        v.extend(std::iter::repeat_n(None, 30));
        assert_eq!(bound(&report(&v, 1.0), 68.0).unwrap(), 0.67);
        // 40 of 100 fail: it is not.
        let mut v: Vec<Option<f64>> = (0..60).map(|i| Some(i as f64 / 100.0)).collect();
        v.extend(std::iter::repeat_n(None, 40));
        assert_eq!(bound(&report(&v, 1.0), 68.0).unwrap(), f64::INFINITY);
        assert!(matches!(bound(&report(&[None, None], 1.0), 50.0), Err(Error::AllFailures)));
        assert_eq!(bound(&report(&[None, None], 1.0), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn truth_requires_truth() {
        let mut r = report(&[Some(0.5)], 1.0);
        assert!(empirical_error_bound(&r, 50.0, Which::P25, Reference::Truth).is_err());
        r.truth = Some(r.ols_baseline);
        assert_eq!(
            empirical_error_bound(&r, 50.0, Which::P25, Reference::Truth).unwrap(),
            bound(&r, 50.0).unwrap()
        );
    }

    #[test]
    fn rejects_bad_q() {
        assert!(bound(&report(&[Some(0.1)], 1.0), 101.0).is_err());
        assert!(bound(&report(&[Some(0.1)], 1.0), -1.0).is_err());
    }

    #[test]
    fn ratio_cdf_cases() {
        let single = ratio_cdf(&[report(&[Some(2.5)], 1.0)], 100.0, Which::P25, Reference::Ols).unwrap();
        assert_eq!(single.points, vec![(2.5, 1.0)]);
        let small: Vec<TrialReport> = (0..5).map(|i| report(&[Some(0.1 * i as f64)], 1.0)).collect();
        let cdf = ratio_cdf(&small, 68.0, Which::P25, Reference::Ols).unwrap();
        assert_eq!(cdf.at(1.0), 1.0);
        let mut with_zero = small.clone();
        with_zero.push(TrialReport {
            dataset_id: "flat".into(),
            ..report(&[Some(0.1)], 0.0)
        });
        let cdf = ratio_cdf(&with_zero, 68.0, Which::P25, Reference::Ols).unwrap();
        assert_eq!(cdf.points.len(), 5);
        assert_eq!(cdf.excluded, vec!["flat".to_string()]);
    }

    #[test]
    fn ratio_cdf_matches_tabulation() {
        use crate::RandomSeed;
        use rand::Rng;
        let mut rng = RandomSeed::new(1).rng();
        let reports: Vec<TrialReport> = (0..100)
            .map(|_| {
                let trials: Vec<Option<f64>> = (0..25).map(|_| Some(rng.random::<f64>())).collect();
                report(&trials, 0.1 + rng.random::<f64>())
            })
            .collect();
        let cdf = ratio_cdf(&reports, 68.0, Which::P25, Reference::Ols).unwrap();
        // 68% of 25 is 17 trials.
        let mut direct: Vec<f64> = reports
            .iter()
            .map(|r| {
                let mut e: Vec<f64> = r.trials.iter().map(|t| t.prediction().unwrap().p25.abs()).collect();
                e.sort_by(|a, b| a.partial_cmp(b).unwrap());
                e[16] / r.sigma_hat.0
            })
            .collect();
        direct.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (i, (got, want)) in cdf.points.iter().zip(&direct).enumerate() {
            assert_eq!(got.0, *want);
            assert_eq!(got.1, (i + 1) as f64 / 100.0);
        }
    }

    #[test]
    fn output_cdf_drops_failures() {
        let trials = [
            TrialOutcome::Released(PredictionPair::new(0.3, 0.0)),
            TrialOutcome::Failed,
            TrialOutcome::Released(PredictionPair::new(0.1, 0.0)),
        ];
        assert_eq!(output_cdf(&trials, Which::P25), vec![(0.1, 0.5), (0.3, 1.0)]);
    }

    proptest! {
        #[test]
        fn bound_is_monotone_and_tops_out_at_max(
            errs in prop::collection::vec(prop::option::weighted(0.9, -1.0f64..1.0), 1..60),
            q1 in 0.0f64..100.0, q2 in 0.0f64..100.0,
        ) {
            let r = report(&errs, 1.0);
            prop_assume!(errs.iter().any(Option::is_some));
            let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
            prop_assert!(bound(&r, lo).unwrap() <= bound(&r, hi).unwrap());
            let max = errs.iter().map(|e| e.map_or(f64::INFINITY, f64::abs)).fold(0.0, f64::max);
            prop_assert_eq!(bound(&r, 100.0).unwrap(), max);
        }
    }
}
