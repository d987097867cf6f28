use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dp_median::OutputRange;
use crate::dp_regression::{
    dp_grad_descent, dp_theilsen, noisy_intercept, noisy_stats, GradDescentParams, MedianVariant,
    StepMode, TheilSenParams,
};
use crate::estimators::{matching_schedule, ols_fit, theilsen_fit, estimates_for_matchings};
use crate::{
    Dataset, Error, LedgerEntry, PredictionPair, PrivacyBudget, Result, Spend, TrialOutcome,
};

fn default_theta() -> f64 {
    0.01
}
fn default_dof() -> u32 {
    3
}
fn default_beta() -> f64 {
    0.5
}
fn default_iterations() -> usize {
    80
}
fn default_tau() -> f64 {
    1.0
}

/// One algorithm with its hyperparameters.
///
/// `k` absent means every matching; `range` absent means the run's default
/// output range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgorithmSpec {
    Ols {},
    Theilsen {},
    NoisyStats {},
    NoisyIntercept {},
    DpExpTheilsen {
        #[serde(default)]
        k: Option<usize>,
        #[serde(default)]
        range: Option<(f64, f64)>,
    },
    DpWideTheilsen {
        #[serde(default)]
        k: Option<usize>,
        #[serde(default = "default_theta")]
        theta: f64,
        #[serde(default)]
        range: Option<(f64, f64)>,
    },
    DpSsTheilsen {
        #[serde(default)]
        k: Option<usize>,
        #[serde(default = "default_dof")]
        d: u32,
        #[serde(default = "default_beta")]
        beta: f64,
        #[serde(default)]
        range: Option<(f64, f64)>,
    },
    DpgdPure {
        #[serde(default = "default_iterations")]
        iterations: usize,
        #[serde(default = "default_tau")]
        tau: f64,
        #[serde(default)]
        step: StepMode,
    },
    DpgdApprox {
        #[serde(default = "default_iterations")]
        iterations: usize,
        #[serde(default = "default_tau")]
        tau: f64,
        #[serde(default)]
        step: StepMode,
    },
    DpgdZcdp {
        #[serde(default = "default_iterations")]
        iterations: usize,
        #[serde(default = "default_tau")]
        tau: f64,
        #[serde(default)]
        step: StepMode,
    },
    /// The maximum observed sensitivity heuristic; family inputs only.
    Mos {},
}

impl AlgorithmSpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Ols {} => "ols",
            Self::Theilsen {} => "theilsen",
            Self::NoisyStats {} => "noisy_stats",
            Self::NoisyIntercept {} => "noisy_intercept",
            Self::DpExpTheilsen { .. } => "dp_exp_theilsen",
            Self::DpWideTheilsen { .. } => "dp_wide_theilsen",
            Self::DpSsTheilsen { .. } => "dp_ss_theilsen",
            Self::DpgdPure { .. } => "dpgd_pure",
            Self::DpgdApprox { .. } => "dpgd_approx",
            Self::DpgdZcdp { .. } => "dpgd_zcdp",
            Self::Mos {} => "mos",
        }
    }

    /// Name plus the matching count when fixed, e.g. `dp_exp_theilsen_k10`.
    pub fn label(&self) -> String {
        match self {
            Self::DpExpTheilsen { k: Some(k), .. }
            | Self::DpWideTheilsen { k: Some(k), .. }
            | Self::DpSsTheilsen { k: Some(k), .. } => format!("{}_k{k}", self.name()),
            _ => self.name().to_string(),
        }
    }

    pub fn is_private(&self) -> bool {
        !matches!(self, Self::Ols {} | Self::Theilsen {})
    }

    pub fn validate(&self) -> Result<()> {
        let check_range = |r: &Option<(f64, f64)>| match r {
            Some((lo, hi)) => OutputRange::new(*lo, *hi).map(|_| ()),
            None => Ok(()),
        };
        let check_k = |k: &Option<usize>| match k {
            Some(0) => Err(Error::Config("k must be >= 1".into())),
            _ => Ok(()),
        };
        match self {
            Self::DpExpTheilsen { k, range } => {
                check_k(k)?;
                check_range(range)
            }
            Self::DpWideTheilsen { k, theta, range } => {
                check_k(k)?;
                if !(*theta >= 0.0 && theta.is_finite()) {
                    return Err(Error::Config(format!("theta must be >= 0, got {theta}")));
                }
                check_range(range)
            }
            Self::DpSsTheilsen { k, d, beta, range } => {
                check_k(k)?;
                if *d == 0 || !(*beta > 0.0 && *beta < 1.0) {
                    return Err(Error::Config(format!("need d >= 1 and beta in (0, 1), got d={d}, beta={beta}")));
                }
                check_range(range)
            }
            Self::DpgdPure { iterations, tau, .. }
            | Self::DpgdApprox { iterations, tau, .. }
            | Self::DpgdZcdp { iterations, tau, .. } => {
                if *iterations < 2 || iterations % 2 != 0 || !(*tau > 0.0) {
                    return Err(Error::Config(format!(
                        "need even iterations >= 2 and tau > 0, got {iterations}, {tau}"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// The budget the algorithm is charged at `epsilon`: pure for most,
    /// `(epsilon, delta)` for the approximate flavor and `rho = epsilon^2 / 2`
    /// for zCDP. `None` for the non-private baselines.
    pub fn budget(&self, epsilon: f64, delta: f64) -> Result<Option<PrivacyBudget>> {
        Ok(match self {
            Self::Ols {} | Self::Theilsen {} => None,
            Self::DpgdApprox { .. } => Some(PrivacyBudget::approx(epsilon, delta)?),
            Self::DpgdZcdp { .. } => Some(PrivacyBudget::zcdp(epsilon * epsilon / 2.0)?),
            _ => Some(PrivacyBudget::pure(epsilon)?),
        })
    }

    pub fn total_spend(&self, epsilon: f64, delta: f64) -> Result<Spend> {
        Ok(self.budget(epsilon, delta)?.map_or_else(Spend::zero, |b| b.to_spend()))
    }

    fn grad_params(&self) -> Option<GradDescentParams> {
        match *self {
            Self::DpgdPure { iterations, tau, step }
            | Self::DpgdApprox { iterations, tau, step }
            | Self::DpgdZcdp { iterations, tau, step } => Some(GradDescentParams {
                iterations,
                tau,
                step,
                ..Default::default()
            }),
            _ => None,
        }
    }

    fn theilsen_params(&self, default_range: OutputRange) -> Result<Option<TheilSenParams>> {
        let resolve = |r: &Option<(f64, f64)>| match r {
            Some((lo, hi)) => OutputRange::new(*lo, *hi),
            None => Ok(default_range),
        };
        Ok(match self {
            Self::DpExpTheilsen { k, range } => {
                Some(TheilSenParams::new(*k, MedianVariant::Exp, resolve(range)?))
            }
            Self::DpWideTheilsen { k, theta, range } => Some(TheilSenParams::new(
                *k,
                MedianVariant::Wide { theta: *theta },
                resolve(range)?,
            )),
            Self::DpSsTheilsen { k, d, beta, range } => Some(TheilSenParams::new(
                *k,
                MedianVariant::Smooth { dof: *d, beta: *beta },
                resolve(range)?,
            )),
            _ => None,
        })
    }

    /// One trial on one dataset. MOS runs on whole families and is rejected here.
    pub fn run<R: Rng + ?Sized>(
        &self,
        d: &Dataset,
        epsilon: f64,
        delta: f64,
        default_range: OutputRange,
        rng: &mut R,
    ) -> Result<(TrialOutcome, Vec<LedgerEntry>)> {
        if let Some(params) = self.theilsen_params(default_range)? {
            let r = dp_theilsen(d, epsilon, &params, rng)?;
            return Ok((r.value.into(), r.spends));
        }
        if let Some(params) = self.grad_params() {
            let budget = self.budget(epsilon, delta)?.expect("private");
            let r = dp_grad_descent(d, &budget, &params, rng)?;
            return Ok((r.value.into(), r.spends));
        }
        match self {
            Self::Ols {} => Ok((ols_outcome(d), Vec::new())),
            Self::Theilsen {} => Ok((complete_theilsen(d)?.into(), Vec::new())),
            Self::NoisyStats {} => {
                let r = noisy_stats(d, epsilon, rng)?;
                Ok((r.value.result, r.spends))
            }
            Self::NoisyIntercept {} => {
                let r = noisy_intercept(d, epsilon, rng)?;
                Ok((r.value.into(), r.spends))
            }
            Self::Mos {} => Err(Error::Config("mos runs on a whole family".into())),
            _ => unreachable!("handled above"),
        }
    }
}

/// OLS predictions, or a failure when every `x` is equal.
pub fn ols_outcome(d: &Dataset) -> TrialOutcome {
    match ols_fit(d) {
        Ok(f) => f.predictions().into(),
        Err(_) => TrialOutcome::Failed,
    }
}

/// Theil-Sen over every pair.
pub fn complete_theilsen(d: &Dataset) -> Result<PredictionPair> {
    let schedule = matching_schedule(d.len())?;
    let all: Vec<usize> = (0..schedule.len()).collect();
    theilsen_fit(&estimates_for_matchings(d, &schedule, &all)?)
}

/// Parses `name` or `name:key=value:key=value`, e.g.
/// `dp_exp_theilsen:k=10:range=-2..2`.
impl FromStr for AlgorithmSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let name = parts.next().unwrap_or_default().trim();
        let mut object = serde_json::Map::new();
        object.insert("name".into(), name.into());
        for part in parts {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value in `{part}`")))?;
            let value = if let Some((lo, hi)) = value.split_once("..") {
                let parse = |v: &str| {
                    v.parse::<f64>().map_err(|_| Error::Config(format!("bad range bound `{v}` in `{s}`")))
                };
                serde_json::json!([parse(lo)?, parse(hi)?])
            } else if let Ok(n) = value.parse::<u64>() {
                n.into()
            } else if let Ok(x) = value.parse::<f64>() {
                x.into()
            } else {
                value.into()
            };
            object.insert(key.trim().into(), value);
        }
        let spec: Self = serde_json::from_value(serde_json::Value::Object(object))
            .map_err(|e| Error::Config(format!("algorithm `{s}`: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }
}
