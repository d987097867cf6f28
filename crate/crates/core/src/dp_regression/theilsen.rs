use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_epsilon, Release};
use crate::dp_median::{
    exp_mech_median, smooth_sens_median, widened_exp_mech_median, MedianMechParams,
    OutputRange, SmoothSensParams,
};
use crate::estimators::{matching_schedule, pairwise_estimates};
use crate::{Dataset, Error, LedgerEntry, PredictionPair, Result, Spend};

/// Which DP median releases each prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MedianVariant {
    Exp,
    Wide { theta: f64 },
    Smooth { dof: u32, beta: f64 },
}

impl MedianVariant {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Exp => "dp_exp_theilsen",
            Self::Wide { .. } => "dp_wide_theilsen",
            Self::Smooth { .. } => "dp_ss_theilsen",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheilSenParams {
    /// Number of matchings; `None` uses all of them.
    pub k: Option<usize>,
    pub variant: MedianVariant,
    pub range: OutputRange,
}

impl TheilSenParams {
    pub fn new(k: Option<usize>, variant: MedianVariant, range: OutputRange) -> Self {
        Self { k, variant, range }
    }
}

/// Theil-Sen over `k` random matchings with each prediction released by a DP
/// median at half the budget.
///
/// One data point touches one pair per matching, so the exponential-mechanism
/// variants run at `epsilon / (2k)`. The smooth-sensitivity variant gets the
/// full half and accounts for `k` in its sensitivity bound.
pub fn dp_theilsen<R: Rng + ?Sized>(
    d: &Dataset,
    epsilon: f64,
    params: &TheilSenParams,
    rng: &mut R,
) -> Result<Release<PredictionPair>> {
    check_epsilon(epsilon)?;
    params.range.validate()?;
    if d.len() < 4 {
        return Err(Error::TooFewPoints {
            needed: 4,
            got: d.len(),
        });
    }
    let schedule = matching_schedule(d.len())?;
    let k = params.k.unwrap_or(schedule.len());
    let estimates = pairwise_estimates(d, &schedule, k, rng)?;
    if estimates.z25.is_empty() {
        return Err(Error::NoValidPairs);
    }
    let half = epsilon / 2.0;
    let release = |z: &[f64], rng: &mut R| -> Result<f64> {
        match params.variant {
            MedianVariant::Exp => {
                exp_mech_median(z, &MedianMechParams::new(half / k as f64, params.range), rng)
            }
            MedianVariant::Wide { theta } => widened_exp_mech_median(
                z,
                &MedianMechParams::widened(half / k as f64, params.range, theta),
                rng,
            ),
            MedianVariant::Smooth { dof, beta } => {
                let p = SmoothSensParams {
                    epsilon: half,
                    k,
                    dof,
                    beta,
                    range: params.range,
                };
                smooth_sens_median(z, &p, rng)
            }
        }
    };
    let p25 = release(&estimates.z25, rng)?;
    let p75 = release(&estimates.z75, rng)?;
    let share = Spend::epsilon(epsilon)?.split(2);
    let name = params.variant.name();
    Ok(Release {
        value: PredictionPair::new(p25, p75),
        spends: vec![
            LedgerEntry::new(format!("{name}/p25"), share.clone()),
            LedgerEntry::new(format!("{name}/p75"), share),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{estimates_for_matchings, theilsen_fit};
    use crate::{BudgetLedger, PrivacyBudget, RandomSeed};

    fn line_with_noise(n: usize, seed: u64) -> Dataset {
        use rand::Rng;
        let mut rng = RandomSeed::new(seed).rng();
        Dataset::from_pairs((0..n).map(|_| {
            let x: f64 = rng.random();
            (x, 0.2 + 0.5 * x + 0.05 * (rng.random::<f64>() - 0.5))
        }))
        .unwrap()
    }

    #[test]
    fn ledger_is_two_halves() {
        let d = line_with_noise(20, 1);
        let mut rng = RandomSeed::new(2).rng();
        for variant in [
            MedianVariant::Exp,
            MedianVariant::Wide { theta: 0.01 },
            MedianVariant::Smooth { dof: 3, beta: 0.5 },
        ] {
            let r = dp_theilsen(&d, 1.3, &TheilSenParams::new(Some(3), variant, OutputRange::default()), &mut rng)
                .unwrap();
            assert_eq!(r.spends.len(), 2);
            assert_eq!(r.spends[0].spend, r.spends[1].spend);
            let ledger = BudgetLedger::new(&PrivacyBudget::pure(1.3).unwrap()).record(&r.spends).unwrap();
            assert!(ledger.is_exhausted());
        }
    }

    #[test]
    fn huge_epsilon_tracks_theilsen() {
        let d = line_with_noise(15, 3);
        let schedule = matching_schedule(15).unwrap();
        let all: Vec<usize> = (0..schedule.len()).collect();
        let ts = theilsen_fit(&estimates_for_matchings(&d, &schedule, &all).unwrap()).unwrap();
        let params = TheilSenParams::new(None, MedianVariant::Exp, OutputRange::default());
        let mut rng = RandomSeed::new(4).rng();
        let close = (0..500)
            .filter(|_| {
                let p = dp_theilsen(&d, 1e7, &params, &mut rng).unwrap().value;
                (p.p25 - ts.p25).abs() < 0.05 && (p.p75 - ts.p75).abs() < 0.05
            })
            .count();
        assert!(close >= 495);
    }

    #[test]
    fn preconditions() {
        let mut rng = RandomSeed::new(5).rng();
        let small = line_with_noise(3, 6);
        let p = TheilSenParams::new(None, MedianVariant::Exp, OutputRange::default());
        assert!(matches!(
            dp_theilsen(&small, 1.0, &p, &mut rng),
            Err(Error::TooFewPoints { needed: 4, got: 3 })
        ));
        let vertical = Dataset::from_pairs(vec![(0.5, 0.1), (0.5, 0.2), (0.5, 0.3), (0.5, 0.4)]).unwrap();
        assert!(matches!(dp_theilsen(&vertical, 1.0, &p, &mut rng), Err(Error::NoValidPairs)));
        let bad = TheilSenParams::new(None, MedianVariant::Exp, OutputRange { lower: 1.0, upper: 0.0 });
        assert!(matches!(
            dp_theilsen(&line_with_noise(6, 7), 1.0, &bad, &mut rng),
            Err(Error::InvalidRange { .. })
        ));
        let too_many = TheilSenParams::new(Some(6), MedianVariant::Exp, OutputRange::default());
        assert!(dp_theilsen(&line_with_noise(6, 7), 1.0, &too_many, &mut rng).is_err());
    }
}
