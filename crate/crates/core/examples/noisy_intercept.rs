//! A noisy mean of `y`, the flat-line baseline.

use dpslr::dp_regression::noisy_intercept;
use dpslr::{Dataset, RandomSeed};

fn main() -> dpslr::Result<()> {
    let d = Dataset::from_pairs((0..400).map(|i| (i as f64 / 399.0, 0.3 + 0.01 * (i % 7) as f64)))?;
    let mut rng = RandomSeed::new(2).rng();
    for eps in [0.1, 1.0] {
        let r = noisy_intercept(&d, eps, &mut rng)?;
        println!("eps {eps}: {:.5} (spent {})", r.value.p25, r.spends[0].spend);
    }
    Ok(())
}
