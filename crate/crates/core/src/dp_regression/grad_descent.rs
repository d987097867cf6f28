use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Release;
use crate::noise::{Gaussian, Laplace};
use crate::{
    DataPoint, Dataset, Error, LedgerEntry, PredictionPair, PrivacyBudget, PrivacyFlavor, Result,
    Spend,
};

/// How the adaptive step size accumulates past updates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepMode {
    /// Separate accumulator per coordinate.
    #[default]
    Coordinate,
    /// One accumulator of squared update norms shared by both coordinates.
    Norm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradDescentParams {
    /// Iteration count `T`; even and at least 2.
    pub iterations: usize,
    /// Per-point clip bound on each coordinate.
    pub tau: f64,
    pub init: PredictionPair,
    #[serde(default)]
    pub step: StepMode,
}

impl Default for GradDescentParams {
    fn default() -> Self {
        Self {
            iterations: 80,
            tau: 1.0,
            init: PredictionPair::new(0.5, 0.5),
            step: StepMode::Coordinate,
        }
    }
}

impl GradDescentParams {
    fn validate(&self) -> Result<()> {
        if self.iterations < 2 || !self.iterations.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "T must be even and >= 2, got {}",
                self.iterations
            )));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidParameter(format!("tau must be > 0, got {}", self.tau)));
        }
        if !self.init.is_finite() {
            return Err(Error::InvalidParameter("initial iterate must be finite".into()));
        }
        Ok(())
    }
}

/// Clipped per-point update direction at `p`.
///
/// Unclipped, this is minus one half of the gradient of `(y - y_hat)^2` with
/// `y_hat = 2 (p25 (3/4 - x) + p75 (x - 1/4))`.
pub fn clipped_direction(p: &PredictionPair, point: &DataPoint, tau: f64) -> (f64, f64) {
    let (x, y) = (point.x(), point.y());
    let fitted = 2.0 * (p.p25 * (0.75 - x) + p.p75 * (x - 0.25));
    let r = y - fitted;
    (
        (2.0 * r * (0.75 - x)).clamp(-tau, tau),
        (2.0 * r * (x - 0.25)).clamp(-tau, tau),
    )
}

/// The `(epsilon, delta)` guarantee of `rho`-zCDP.
pub fn rho_to_epsilon(rho: f64, delta: f64) -> f64 {
    rho + (4.0 * rho * ((std::f64::consts::PI * rho).sqrt() / delta).ln()).sqrt()
}

/// Largest `rho` whose [`rho_to_epsilon`] does not exceed `epsilon`, found by
/// bisection down to adjacent floats.
pub fn approx_to_rho(epsilon: f64, delta: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidBudget(format!(
            "need epsilon > 0 and delta in (0, 1), got ({epsilon}, {delta})"
        )));
    }
    // Below delta^2 / pi the logarithm is negative and the bound meaningless.
    let mut lo = delta * delta / std::f64::consts::PI;
    let mut hi = epsilon;
    if rho_to_epsilon(lo, delta) > epsilon {
        return Err(Error::InvalidBudget(format!(
            "delta {delta} too large for epsilon {epsilon}"
        )));
    }
    loop {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        if rho_to_epsilon(mid, delta) <= epsilon {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

enum Perturbation {
    Laplace(Laplace),
    Gaussian(Gaussian),
}

impl Perturbation {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Laplace(d) => d.sample(rng),
            Self::Gaussian(d) => d.sample(rng),
        }
    }
}

/// Noisy clipped full-batch gradient descent on the squared loss, returning
/// the average of the last `T/2` iterates.
///
/// Pure budgets add Laplace noise at `epsilon / T` per step; zCDP budgets add
/// Gaussian noise at `rho / T`. An approximate budget is converted to the
/// largest `rho` that implies it and then run as zCDP.
pub fn dp_grad_descent<R: Rng + ?Sized>(
    d: &Dataset,
    budget: &PrivacyBudget,
    params: &GradDescentParams,
    rng: &mut R,
) -> Result<Release<PredictionPair>> {
    params.validate()?;
    let t_total = params.iterations;
    let tf = t_total as f64;
    let tau = params.tau;
    let (noise, spends) = match budget.flavor() {
        PrivacyFlavor::Pure => {
            let eps_t = budget.epsilon() / tf;
            let step = Spend::epsilon(budget.epsilon())?.split(t_total as u64);
            (
                Perturbation::Laplace(Laplace::centered(4.0 * tau / eps_t)?),
                vec![LedgerEntry::new("dpgd_pure/step", step); t_total],
            )
        }
        PrivacyFlavor::Zcdp => {
            let rho_t = budget.rho() / tf;
            let step = Spend::rho(budget.rho())?.split(t_total as u64);
            (
                Perturbation::Gaussian(Gaussian::new(0.0, 2.0 * tau / rho_t.sqrt())?),
                vec![LedgerEntry::new("dpgd_zcdp/step", step); t_total],
            )
        }
        PrivacyFlavor::Approx => {
            let rho = approx_to_rho(budget.epsilon(), budget.delta())?;
            let rho_t = rho / tf;
            (
                Perturbation::Gaussian(Gaussian::new(0.0, 2.0 * tau / rho_t.sqrt())?),
                vec![LedgerEntry::new(
                    format!("dpgd_approx (rho={rho:e} over {t_total} steps)"),
                    budget.to_spend(),
                )],
            )
        }
    };

    let mut p = params.init;
    let mut acc = (0.0f64, 0.0f64);
    let mut tail = (0.0f64, 0.0f64);
    for t in 0..t_total {
        if t >= t_total / 2 {
            tail.0 += p.p25;
            tail.1 += p.p75;
        }
        let (mut g25, mut g75) = d
            .points()
            .iter()
            .map(|pt| clipped_direction(&p, pt, tau))
            .fold((0.0, 0.0), |a, g| (a.0 + g.0, a.1 + g.1));
        g25 += noise.sample(rng);
        g75 += noise.sample(rng);
        let (s25, s75) = match params.step {
            StepMode::Coordinate => {
                acc.0 += g25 * g25;
                acc.1 += g75 * g75;
                (inverse_sqrt(acc.0), inverse_sqrt(acc.1))
            }
            StepMode::Norm => {
                acc.0 += g25 * g25 + g75 * g75;
                let s = inverse_sqrt(acc.0);
                (s, s)
            }
        };
        p = PredictionPair::new(p.p25 + s25 * g25, p.p75 + s75 * g75);
    }
    let half = tf / 2.0;
    Ok(Release {
        value: PredictionPair::new(tail.0 / half, tail.1 / half),
        spends,
    })
}

fn inverse_sqrt(v: f64) -> f64 {
    if v > 0.0 {
        1.0 / v.sqrt()
    } else {
        0.0
    }
}
