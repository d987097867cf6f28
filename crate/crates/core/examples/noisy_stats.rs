//! Noisy sufficient statistics, including how often it fails.

use dpslr::datagen::{gen_synthetic, SyntheticSpec};
use dpslr::dp_regression::noisy_stats;
use dpslr::estimators::ols_fit;
use dpslr::{RandomSeed, TrialOutcome};

fn main() -> dpslr::Result<()> {
    let spec = SyntheticSpec { n: 200, ..Default::default() };
    let data = gen_synthetic(&spec, &mut RandomSeed::new(5).rng())?;
    let ols = ols_fit(&data.dataset)?.predictions();
    println!("ols: p25 {:.4}, p75 {:.4}", ols.p25, ols.p75);

    let mut rng = RandomSeed::new(6).rng();
    for eps in [0.1, 1.0, 10.0] {
        let trials = 1000;
        let mut failed = 0;
        let mut last = None;
        for _ in 0..trials {
            let r = noisy_stats(&data.dataset, eps, &mut rng)?;
            match r.value.result {
                TrialOutcome::Released(p) => last = Some(p),
                TrialOutcome::Failed => failed += 1,
            }
        }
        println!("eps {eps:>4}: failure rate {:.3}, last release {last:?}", failed as f64 / trials as f64);
    }
    Ok(())
}
