//! Seeded samplers for the distributions the mechanisms need.
//!
//! Laplace, Gumbel and exponential draws use the inverse CDF of a uniform
//! draw on the open interval `(0, 1)`, so no logarithm ever sees zero.
//! Student's T is the ratio of a standard normal and `sqrt(chi2(d) / d)`.

use rand::distr::Distribution;
use rand::{Rng, RngCore};
use rand_distr::{ChiSquared, StandardNormal};

use crate::{Error, Result};

/// Uniform draw on the open interval `(0, 1)`.
pub fn uniform_open<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Laplace {
    location: f64,
    scale: f64,
}

impl Laplace {
    pub fn new(location: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) || !location.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Laplace needs finite location and scale > 0, got ({location}, {scale})"
            )));
        }
        Ok(Self { location, scale })
    }

    pub fn centered(scale: f64) -> Result<Self> {
        Self::new(0.0, scale)
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

impl Distribution<f64> for Laplace {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u = uniform_open(rng) - 0.5;
        self.location - self.scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
    }
}

/// Standard Gumbel(0, 1).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Gumbel;

impl Distribution<f64> for Gumbel {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        -(-uniform_open(rng).ln()).ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudentsT {
    dof: u32,
    chi: ChiSquared<f64>,
}

impl StudentsT {
    pub fn new(dof: u32) -> Result<Self> {
        if dof == 0 {
            return Err(Error::InvalidParameter("Student's T needs d >= 1".into()));
        }
        let chi = ChiSquared::new(f64::from(dof))
            .map_err(|e| Error::InvalidParameter(format!("chi-square({dof}): {e}")))?;
        Ok(Self { dof, chi })
    }

    pub fn dof(&self) -> u32 {
        self.dof
    }
}

impl Distribution<f64> for StudentsT {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        let v = self.chi.sample(rng);
        z / (v / f64::from(self.dof)).sqrt()
    }
}

/// Uniform on `[lo, hi]` (interior draws only).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformInterval {
    lo: f64,
    hi: f64,
}

impl UniformInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "uniform needs finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }
}

impl Distribution<f64> for UniformInterval {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.lo + (self.hi - self.lo) * uniform_open(rng)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian {
    mean: f64,
    std_dev: f64,
}

impl Gaussian {
    pub fn new(mean: f64, std_dev: f64) -> Result<Self> {
        if !(std_dev >= 0.0 && std_dev.is_finite()) || !mean.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Gaussian needs finite mean and sigma >= 0, got ({mean}, {std_dev})"
            )));
        }
        Ok(Self { mean, std_dev })
    }
}

impl Distribution<f64> for Gaussian {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        self.mean + self.std_dev * z
    }
}

/// Exponential with the given scale (mean).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponential {
    scale: f64,
}

impl Exponential {
    pub fn new(scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "exponential needs scale > 0, got {scale}"
            )));
        }
        Ok(Self { scale })
    }
}

impl Distribution<f64> for Exponential {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        -self.scale * uniform_open(rng).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RandomSeed;

    fn draws<D: Distribution<f64>>(dist: &D, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = RandomSeed::new(seed).rng();
        (0..n).map(|_| dist.sample(&mut rng)).collect()
    }

    fn mean(v: &[f64]) -> f64 {
        v.iter().sum::<f64>() / v.len() as f64
    }

    fn variance(v: &[f64]) -> f64 {
        let m = mean(v);
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
    }

    #[test]
    fn uniform_open_stays_inside() {
        let mut rng = RandomSeed::new(1).rng();
        for _ in 0..100_000 {
            let u = uniform_open(&mut rng);
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn laplace_moments() {
        let b = 2.0;
        let d = draws(&Laplace::new(1.0, b).unwrap(), 1_000_000, 2);
        assert!((mean(&d) - 1.0).abs() < 5.0 * b / 1e3);
        let beyond = d.iter().filter(|x| (*x - 1.0).abs() > b * 2f64.ln()).count();
        assert!((beyond as f64 / 1e6 - 0.5).abs() < 0.01);
    }

    #[test]
    fn laplace_deterministic() {
        let l = Laplace::centered(1.0).unwrap();
        assert_eq!(draws(&l, 16, 9), draws(&l, 16, 9));
        assert_ne!(draws(&l, 16, 9), draws(&l, 16, 10));
    }

    #[test]
    fn gumbel_mean_and_median() {
        let mut d = draws(&Gumbel, 1_000_000, 3);
        assert!((mean(&d) - 0.577_215_664_9).abs() < 0.01);
        d.sort_by(f64::total_cmp);
        assert!((d[500_000] - (-(2f64.ln()).ln())).abs() < 0.01);
    }

    #[test]
    fn gumbel_max_is_softmax() {
        let scores = [0.3, -1.0, 1.2, 0.0, 0.7];
        let z: f64 = scores.iter().map(|s: &f64| s.exp()).sum();
        let mut counts = [0usize; 5];
        let mut rng = RandomSeed::new(4).rng();
        let n = 1_000_000;
        for _ in 0..n {
            let best = scores
                .iter()
                .map(|s| s + Gumbel.sample(&mut rng))
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap()
                .0;
            counts[best] += 1;
        }
        let tv: f64 = scores
            .iter()
            .zip(counts)
            .map(|(s, c)| (s.exp() / z - c as f64 / n as f64).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.01, "tv = {tv}");
    }

    #[test]
    fn students_t_variance_and_symmetry() {
        let d = draws(&StudentsT::new(3).unwrap(), 1_000_000, 5);
        // d = 3 has no fourth moment, so this estimate converges slowly.
        let v = variance(&d);
        assert!((v - 3.0).abs() / 3.0 < 0.05, "variance {v}");
        let positive = d.iter().filter(|x| **x > 0.0).count() as f64 / 1e6;
        assert!((positive - 0.5).abs() < 0.005);
        assert!(StudentsT::new(0).is_err());
    }

    #[test]
    fn other_samplers() {
        let u = draws(&UniformInterval::new(0.0, 1.0).unwrap(), 1_000_000, 6);
        assert!((mean(&u) - 0.5).abs() < 0.002);
        let g = draws(&Gaussian::new(0.0, 0.2).unwrap(), 1_000_000, 7);
        assert!((variance(&g).sqrt() - 0.2).abs() / 0.2 < 0.01);
        let e = draws(&Exponential::new(52.0).unwrap(), 1_000_000, 8);
        assert!((mean(&e) - 52.0).abs() / 52.0 < 0.01);
        assert!(UniformInterval::new(1.0, 1.0).is_err());
        assert!(Gaussian::new(0.0, -1.0).is_err());
        assert!(Exponential::new(0.0).is_err());
        assert!(Laplace::new(0.0, 0.0).is_err());
    }
}
