//! Non-private baselines: OLS with its standard error, and Theil-Sen over all
//! pairs or a few random matchings.

use dpslr::estimators::{matching_schedule, ols_fit, ols_standard_error, pairwise_estimates, sufficient_stats, theilsen_fit};
use dpslr::{Dataset, RandomSeed};

fn main() -> dpslr::Result<()> {
    let d = Dataset::from_pairs([(0.1, 0.22), (0.2, 0.31), (0.35, 0.38), (0.5, 0.47), (0.6, 0.58), (0.8, 0.61), (0.9, 0.72)])?;

    let fit = ols_fit(&d)?;
    let stats = sufficient_stats(&d);
    println!("ols: slope {:.4}, intercept {:.4}", fit.alpha_hat, fit.beta_hat);
    for x in [0.25, 0.75] {
        println!("  prediction at {x}: {:.4} +/- {:.4}", fit.predict(x), ols_standard_error(&fit, &stats, x)?);
    }

    let schedule = matching_schedule(d.len())?;
    println!("{} points give {} perfect matchings", d.len(), schedule.len());
    let mut rng = RandomSeed::new(7).rng();
    for k in [schedule.len(), 2] {
        let p = theilsen_fit(&pairwise_estimates(&d, &schedule, k, &mut rng)?)?;
        println!("theil-sen over {k} matchings: p25 {:.4}, p75 {:.4}", p.p25, p.p75);
    }
    Ok(())
}
