//! Differentially private simple linear regression.
//!
//! The crate releases the pair of predictions `(p25, p75)` of a simple linear
//! regression on data in the unit square, under several privacy mechanisms:
//!
//! * [`dp_regression::noisy_stats`] perturbs the OLS sufficient statistics.
//! * [`dp_regression::dp_theilsen`] runs Theil-Sen over `k` matchings and
//!   releases the median with one of three DP median mechanisms
//!   ([`dp_median`]).
//! * [`dp_regression::dp_grad_descent`] runs clipped noisy gradient descent
//!   under pure DP, approximate DP, or zCDP.
//! * [`dp_regression::noisy_intercept`] releases a noisy mean.
//! * [`dp_regression::mos_release`] is the non-private "maximum observed
//!   sensitivity" heuristic, kept as a baseline.
//!
//! Non-private baselines live in [`estimators`], samplers in [`noise`],
//! evaluation metrics in [`metrics`], data generators in [`datagen`], and the
//! Monte Carlo experiment runner behind the `dpslr` binary in [`experiment`].
//!
//! Every randomized routine takes an explicit generator; [`RandomSeed`] builds
//! reproducible, independent streams so results do not depend on thread
//! scheduling.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod budget;
pub mod datagen;
pub mod dp_median;
pub mod dp_regression;
mod error;
pub mod estimators;
pub mod experiment;
pub mod metrics;
pub mod noise;
mod rng;
mod types;

pub use budget::{BudgetLedger, LedgerEntry, PrivacyBudget, PrivacyFlavor, Spend};
pub use error::{Error, Result};
pub use rng::{RandomSeed, SeedStream};
pub use types::{clip_unit, DataPoint, Dataset, PredictionPair, TrialOutcome};
