//! Non-private baselines: OLS and Theil-Sen over matchings of `K_n`.

mod ols;
mod theilsen;

pub use ols::{ols_fit, ols_standard_error, sufficient_stats, OlsFit, SufficientStats};
pub use theilsen::{
    edge_estimate, estimates_for_matchings, matching_schedule, median, median_sorted,
    pairwise_estimates, theilsen_fit, MatchingSchedule, PairwiseEstimates,
};
