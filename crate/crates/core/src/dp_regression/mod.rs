//! Private releases of the prediction pair `(p25, p75)`.
//!
//! Every mechanism returns a [`Release`]: the value plus the ledger entries it
//! spent. Entries of one release always sum to the budget the caller passed.

mod grad_descent;
mod intercept;
mod mos;
mod noisy_stats;
mod theilsen;

pub use grad_descent::{
    approx_to_rho, clipped_direction, dp_grad_descent, rho_to_epsilon, GradDescentParams,
    StepMode,
};
pub use intercept::noisy_intercept;
pub use mos::{
    grid_sensitivity, is_eligible, mos_release, MosOutcome, MosRelease, TractFamily,
};
pub use noisy_stats::{noisy_stats, NoisyStatsOutput};
pub use theilsen::{dp_theilsen, MedianVariant, TheilSenParams};

use crate::{Error, LedgerEntry, Result};

/// A mechanism output together with the budget it consumed.
#[derive(Debug, Clone, PartialEq)]
pub struct Release<T> {
    pub value: T,
    pub spends: Vec<LedgerEntry>,
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidBudget(format!(
            "epsilon must be finite and > 0, got {epsilon}"
        )))
    }
}
