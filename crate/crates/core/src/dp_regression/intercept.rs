use rand::distr::Distribution;
use rand::Rng;

use super::{check_epsilon, Release};
use crate::noise::Laplace;
use crate::{Dataset, LedgerEntry, PredictionPair, Result, Spend};

/// Noisy mean of `y`, released as both predictions.
pub fn noisy_intercept<R: Rng + ?Sized>(
    d: &Dataset,
    epsilon: f64,
    rng: &mut R,
) -> Result<Release<PredictionPair>> {
    check_epsilon(epsilon)?;
    let n = d.len() as f64;
    let mean = d.ys().sum::<f64>() / n;
    let y = mean + Laplace::centered(1.0 / (epsilon * n))?.sample(rng);
    Ok(Release {
        value: PredictionPair::new(y, y),
        spends: vec![LedgerEntry::new("noisy_intercept", Spend::epsilon(epsilon)?)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RandomSeed;

    #[test]
    fn noise_scale() {
        let d = Dataset::from_pairs((0..100).map(|i| (i as f64 / 99.0, 0.3))).unwrap();
        let mut rng = RandomSeed::new(1).rng();
        let out: Vec<f64> = (0..10_000)
            .map(|_| noisy_intercept(&d, 1.0, &mut rng).unwrap().value.p25)
            .collect();
        let mean = out.iter().sum::<f64>() / 1e4;
        let sd = (out.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 9999.0).sqrt();
        let expected = 2f64.sqrt() / 100.0;
        assert!((sd - expected).abs() / expected < 0.05);
        let near = out.iter().filter(|v| (*v - 0.3).abs() <= 0.05).count();
        assert!(near as f64 / 1e4 >= 0.95);
    }

    #[test]
    fn large_epsilon_returns_mean() {
        let d = Dataset::from_pairs([(0.0, 0.1), (1.0, 0.5), (0.5, 0.6)]).unwrap();
        let mut rng = RandomSeed::new(2).rng();
        let p = noisy_intercept(&d, 1e9, &mut rng).unwrap().value;
        assert!((p.p25 - 0.4).abs() < 1e-6);
        assert_eq!(p.p25, p.p75);
    }
}
