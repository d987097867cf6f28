//! Noisy gradient descent under pure DP, approximate DP and zCDP.

use dpslr::datagen::{gen_synthetic, SyntheticSpec};
use dpslr::dp_regression::{approx_to_rho, dp_grad_descent, GradDescentParams, StepMode};
use dpslr::{PrivacyBudget, RandomSeed};

fn main() -> dpslr::Result<()> {
    let data = gen_synthetic(&SyntheticSpec { n: 2000, ..Default::default() }, &mut RandomSeed::new(21).rng())?;
    println!("truth     p25 {:.4} p75 {:.4}", data.truth.p25, data.truth.p75);

    let delta = 2f64.powi(-30);
    println!("(2, 2^-30)-DP is implied by rho = {:.5}", approx_to_rho(2.0, delta)?);
    let budgets = [
        ("pure", PrivacyBudget::pure(2.0)?),
        ("approx", PrivacyBudget::approx(2.0, delta)?),
        ("zcdp", PrivacyBudget::zcdp(2.0)?),
    ];
    let mut rng = RandomSeed::new(22).rng();
    for step in [StepMode::Coordinate, StepMode::Norm] {
        let params = GradDescentParams { step, ..Default::default() };
        for (name, budget) in &budgets {
            let r = dp_grad_descent(&data.dataset, budget, &params, &mut rng)?;
            println!("{name:<7} {step:?}: p25 {:.4} p75 {:.4} ({} ledger entries)", r.value.p25, r.value.p75, r.spends.len());
        }
    }
    Ok(())
}
