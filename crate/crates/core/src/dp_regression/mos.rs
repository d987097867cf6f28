//! The "maximum observed sensitivity" heuristic. Not differentially private.

use rand::distr::Distribution;
use rand::Rng;
use serde::Serialize;

use super::{check_epsilon, Release};
use crate::estimators::{median, ols_fit};
use crate::noise::Laplace;
use crate::{DataPoint, Dataset, Error, LedgerEntry, PredictionPair, Result, Spend};

/// Tracts of one state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TractFamily {
    pub state: String,
    pub tracts: Vec<(String, Dataset)>,
}

impl TractFamily {
    pub fn new(state: impl Into<String>, tracts: Vec<(String, Dataset)>) -> Self {
        Self {
            state: state.into(),
            tracts,
        }
    }

    /// Median parent percentile over every tract.
    pub fn state_median(&self) -> Option<f64> {
        let xs: Vec<f64> = self.tracts.iter().flat_map(|(_, d)| d.xs()).collect();
        median(&xs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MosOutcome {
    Released(PredictionPair),
    Suppressed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MosRelease {
    /// Largest `n * grid sensitivity` over eligible tracts, per prediction.
    pub mos: (f64, f64),
    pub tracts: Vec<(String, MosOutcome)>,
}

pub const MIN_TRACT_SIZE: usize = 20;

/// At least 20 points, with at least 10% of `x` above and 10% below the state
/// median.
pub fn is_eligible(d: &Dataset, state_median: f64) -> bool {
    let n = d.len();
    if n < MIN_TRACT_SIZE {
        return false;
    }
    let above = d.xs().filter(|&x| x > state_median).count();
    let below = d.xs().filter(|&x| x < state_median).count();
    10 * above >= n && 10 * below >= n
}

/// Largest change in each OLS prediction when one point of the 11 x 11 grid
/// on the unit square is added.
pub fn grid_sensitivity(d: &Dataset) -> Result<(f64, f64)> {
    let base = ols_fit(d)?.predictions();
    let mut worst = (0.0f64, 0.0f64);
    for i in 0..=10 {
        for j in 0..=10 {
            let extra = DataPoint::clipped(f64::from(i) / 10.0, f64::from(j) / 10.0)?;
            let p = ols_fit(&d.with_extra_point(extra))?.predictions();
            worst.0 = worst.0.max((p.p25 - base.p25).abs());
            worst.1 = worst.1.max((p.p75 - base.p75).abs());
        }
    }
    Ok(worst)
}

/// OLS predictions of each eligible tract plus Laplace noise of scale
/// `MOS / (n * epsilon / 2)`, where MOS is the state-wide maximum of
/// `n * grid sensitivity`.
pub fn mos_release<R: Rng + ?Sized>(
    family: &TractFamily,
    epsilon: f64,
    rng: &mut R,
) -> Result<Release<MosRelease>> {
    check_epsilon(epsilon)?;
    let state_median = family.state_median().ok_or(Error::EmptyFamily)?;
    let mut fits = Vec::with_capacity(family.tracts.len());
    let mut mos = (0.0f64, 0.0f64);
    for (id, d) in &family.tracts {
        if !is_eligible(d, state_median) {
            fits.push((id.clone(), None));
            continue;
        }
        let (s25, s75) = grid_sensitivity(d)?;
        let n = d.len() as f64;
        mos.0 = mos.0.max(n * s25);
        mos.1 = mos.1.max(n * s75);
        fits.push((id.clone(), Some((n, ols_fit(d)?.predictions()))));
    }
    let cell_epsilon = epsilon / 2.0;
    let mut tracts = Vec::with_capacity(fits.len());
    for (id, fit) in fits {
        let outcome = match fit {
            None => MosOutcome::Suppressed,
            Some((n, p)) => MosOutcome::Released(PredictionPair::new(
                p.p25 + laplace_or_zero(mos.0 / (n * cell_epsilon), rng)?,
                p.p75 + laplace_or_zero(mos.1 / (n * cell_epsilon), rng)?,
            )),
        };
        tracts.push((id, outcome));
    }
    let share = Spend::epsilon(epsilon)?.split(2);
    Ok(Release {
        value: MosRelease { mos, tracts },
        spends: vec![
            LedgerEntry::new("mos/p25 (heuristic, not DP)", share.clone()),
            LedgerEntry::new("mos/p75 (heuristic, not DP)", share),
        ],
    })
}

fn laplace_or_zero<R: Rng + ?Sized>(scale: f64, rng: &mut R) -> Result<f64> {
    if scale > 0.0 {
        Ok(Laplace::centered(scale)?.sample(rng))
    } else {
        Ok(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::sufficient_stats;
    use crate::RandomSeed;
    use rand::Rng;

    fn tract(n: usize, seed: u64) -> Dataset {
        let mut rng = RandomSeed::new(seed).rng();
        Dataset::from_pairs((0..n).map(|_| {
            let x: f64 = rng.random();
            (x, 0.3 + 0.4 * x + 0.1 * rng.random::<f64>())
        }))
        .unwrap()
    }

    /// Closed-form OLS prediction after appending one point.
    fn predictions_with(d: &Dataset, extra: (f64, f64)) -> PredictionPair {
        let s = sufficient_stats(d);
        let n = s.n as f64;
        let (x, y) = extra;
        let xbar = (n * s.xbar + x) / (n + 1.0);
        let ybar = (n * s.ybar + y) / (n + 1.0);
        let nvar = s.nvar + n / (n + 1.0) * (x - s.xbar).powi(2);
        let ncov = s.ncov + n / (n + 1.0) * (x - s.xbar) * (y - s.ybar);
        let a = ncov / nvar;
        PredictionPair::from_line(a, ybar - a * xbar)
    }

    #[test]
    fn grid_sensitivity_matches_update_formula() {
        let d = tract(40, 1);
        let base = ols_fit(&d).unwrap().predictions();
        let mut expected = (0.0f64, 0.0f64);
        for i in 0..=10 {
            for j in 0..=10 {
                let p = predictions_with(&d, (i as f64 / 10.0, j as f64 / 10.0));
                expected.0 = expected.0.max((p.p25 - base.p25).abs());
                expected.1 = expected.1.max((p.p75 - base.p75).abs());
            }
        }
        let got = grid_sensitivity(&d).unwrap();
        assert!((got.0 - expected.0).abs() < 1e-12 && (got.1 - expected.1).abs() < 1e-12);
    }

    #[test]
    fn single_tract_noise_scale() {
        let d = tract(60, 2);
        let (c, _) = grid_sensitivity(&d).unwrap();
        let family = TractFamily::new("s", vec![("t".into(), d.clone())]);
        let ols = ols_fit(&d).unwrap().predictions();
        let mut rng = RandomSeed::new(3).rng();
        let eps = 4.0;
        let dev: Vec<f64> = (0..20_000)
            .map(|_| match mos_release(&family, eps, &mut rng).unwrap().value.tracts[0].1 {
                MosOutcome::Released(p) => (p.p25 - ols.p25).abs(),
                MosOutcome::Suppressed => panic!("eligible tract suppressed"),
            })
            .collect();
        // Mean |Laplace(b)| is b, with b = n c / (n eps / 2) = 2c / eps.
        let mean = dev.iter().sum::<f64>() / dev.len() as f64;
        let b = 2.0 * c / eps;
        assert!((mean - b).abs() / b < 0.03, "{mean} vs {b}");
    }

    #[test]
    fn small_tracts_are_suppressed() {
        let family = TractFamily::new(
            "s",
            vec![("small".into(), tract(19, 4)), ("big".into(), tract(50, 5))],
        );
        let mut rng = RandomSeed::new(6).rng();
        let r = mos_release(&family, 16.0, &mut rng).unwrap().value;
        assert_eq!(r.tracts[0].1, MosOutcome::Suppressed);
        assert!(matches!(r.tracts[1].1, MosOutcome::Released(_)));
    }

    #[test]
    fn one_sided_tract_is_suppressed() {
        let low = Dataset::from_pairs((0..30).map(|i| (0.1 + i as f64 / 300.0, 0.2))).unwrap();
        assert!(!is_eligible(&low, 0.5));
        assert!(is_eligible(&tract(30, 7), 0.5));
    }

    #[test]
    fn duplicated_tracts_share_mos() {
        let d = tract(45, 8);
        let single = TractFamily::new("s", vec![("a".into(), d.clone())]);
        let double = TractFamily::new("s", vec![("a".into(), d.clone()), ("b".into(), d)]);
        let mut rng = RandomSeed::new(9).rng();
        let a = mos_release(&single, 1.0, &mut rng).unwrap().value.mos;
        let b = mos_release(&double, 1.0, &mut rng).unwrap().value.mos;
        assert_eq!(a, b);
    }

    #[test]
    fn empty_family() {
        let mut rng = RandomSeed::new(10).rng();
        assert!(matches!(
            mos_release(&TractFamily::new("s", vec![]), 1.0, &mut rng),
            Err(Error::EmptyFamily)
        ));
    }
}
