use rand::distr::Distribution;
use rand::Rng;
use serde::Serialize;

use super::{check_epsilon, Release};
use crate::estimators::sufficient_stats;
use crate::noise::Laplace;
use crate::{Dataset, LedgerEntry, PredictionPair, Result, Spend, TrialOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoisyStatsOutput {
    pub result: TrialOutcome,
    pub noisy_nvar: f64,
    pub noisy_ncov: f64,
    pub alpha_tilde: Option<f64>,
    pub beta_tilde: Option<f64>,
}

/// Laplace noise on `ncov`, `nvar` and the intercept; fails when the noisy
/// `nvar` is not positive.
///
/// The noisy statistics are part of the release and cost nothing extra.
pub fn noisy_stats<R: Rng + ?Sized>(
    d: &Dataset,
    epsilon: f64,
    rng: &mut R,
) -> Result<Release<NoisyStatsOutput>> {
    check_epsilon(epsilon)?;
    let stats = sufficient_stats(d);
    let n = stats.n as f64;
    let delta = 1.0 - 1.0 / n;
    let moment_noise = Laplace::centered(3.0 * delta / epsilon)?;
    let noisy_ncov = stats.ncov + moment_noise.sample(rng);
    let noisy_nvar = stats.nvar + moment_noise.sample(rng);
    let spends = vec![LedgerEntry::new("noisy_stats", Spend::epsilon(epsilon)?)];
    if noisy_nvar <= 0.0 {
        return Ok(Release {
            value: NoisyStatsOutput {
                result: TrialOutcome::Failed,
                noisy_nvar,
                noisy_ncov,
                alpha_tilde: None,
                beta_tilde: None,
            },
            spends,
        });
    }
    let alpha = noisy_ncov / noisy_nvar;
    let delta3 = (1.0 + alpha.abs()) / n;
    let beta = stats.ybar - alpha * stats.xbar + Laplace::centered(3.0 * delta3 / epsilon)?.sample(rng);
    Ok(Release {
        value: NoisyStatsOutput {
            result: PredictionPair::from_line(alpha, beta).into(),
            noisy_nvar,
            noisy_ncov,
            alpha_tilde: Some(alpha),
            beta_tilde: Some(beta),
        },
        spends,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::ols_fit;
    use crate::{DataPoint, RandomSeed};
    use rand::Rng;

    fn random_dataset<R: Rng>(n: usize, rng: &mut R) -> Dataset {
        Dataset::from_pairs((0..n).map(|_| (rng.random::<f64>(), rng.random::<f64>()))).unwrap()
    }

    #[test]
    fn moment_sensitivity_search() {
        let mut rng = RandomSeed::new(10).rng();
        for n in [2usize, 5, 30] {
            let bound = 1.0 - 1.0 / n as f64 + 1e-12;
            for _ in 0..10_000 {
                let d = random_dataset(n, &mut rng);
                let i = rng.random_range(0..n);
                let p = DataPoint::clipped(rng.random(), rng.random()).unwrap();
                let (a, b) = (sufficient_stats(&d), sufficient_stats(&d.with_point(i, p)));
                assert!((a.nvar - b.nvar).abs() <= bound);
                assert!((a.ncov - b.ncov).abs() <= bound);
            }
        }
    }

    #[test]
    fn extreme_neighbours_approach_the_bound() {
        // All mass at 0 except one point moved from 0 to 1.
        let n = 5;
        let zeros = Dataset::from_pairs(vec![(0.0, 0.0); n]).unwrap();
        let moved = zeros.with_point(0, DataPoint::clipped(1.0, 1.0).unwrap());
        let (a, b) = (sufficient_stats(&zeros), sufficient_stats(&moved));
        assert!((b.nvar - a.nvar - (1.0 - 1.0 / n as f64)).abs() < 1e-12);
        assert!((b.ncov - a.ncov - (1.0 - 1.0 / n as f64)).abs() < 1e-12);
    }

    #[test]
    fn huge_epsilon_matches_ols() {
        let mut rng = RandomSeed::new(11).rng();
        let d = random_dataset(50, &mut rng);
        let ols = ols_fit(&d).unwrap().predictions();
        let close = (0..1000)
            .filter(|_| {
                let out = noisy_stats(&d, 1e9, &mut rng).unwrap().value;
                let p = out.result.prediction().unwrap();
                (p.p25 - ols.p25).abs() < 1e-6 && (p.p75 - ols.p75).abs() < 1e-6
            })
            .count();
        assert!(close >= 999);
    }

    #[test]
    fn failure_matches_laplace_cdf() {
        // nvar = 0.02 over 39 points.
        let half = 0.02f64.sqrt() / (2.0 * 39f64.sqrt());
        let d = Dataset::from_pairs((0..39).map(|i| {
            let x = if i % 2 == 0 { 0.5 + half } else { 0.5 - half };
            (x, 0.5)
        }))
        .unwrap();
        let stats = sufficient_stats(&d);
        let eps = 0.5;
        let b = 3.0 * (1.0 - 1.0 / 39.0) / eps;
        let analytic = 0.5 * (-stats.nvar / b).exp();
        let mut rng = RandomSeed::new(12).rng();
        let failures = (0..10_000)
            .filter(|_| noisy_stats(&d, eps, &mut rng).unwrap().value.result.is_failure())
            .count();
        assert!((failures as f64 / 1e4 - analytic).abs() < 0.01);
    }

    #[test]
    fn failure_iff_noisy_nvar_nonpositive() {
        let mut rng = RandomSeed::new(13).rng();
        let d = random_dataset(8, &mut rng);
        for _ in 0..2000 {
            let out = noisy_stats(&d, 0.2, &mut rng).unwrap().value;
            assert_eq!(out.result.is_failure(), out.noisy_nvar <= 0.0);
            assert_eq!(out.alpha_tilde.is_some(), !out.result.is_failure());
        }
    }

    #[test]
    fn single_ledger_entry() {
        let mut rng = RandomSeed::new(14).rng();
        let d = random_dataset(8, &mut rng);
        let r = noisy_stats(&d, 0.7, &mut rng).unwrap();
        assert_eq!(r.spends.len(), 1);
        assert_eq!(r.spends[0].spend, Spend::epsilon(0.7).unwrap());
        assert!(noisy_stats(&d, 0.0, &mut rng).is_err());
    }
}
