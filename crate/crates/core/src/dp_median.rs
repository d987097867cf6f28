//! Differentially private medians over a bounded output range.
//!
//! Three mechanisms are provided:
//!
//! * [`exp_mech_median`]: the exponential mechanism with utility
//!   `-|#above r - #below r|`, sampled in two steps (pick an interval between
//!   consecutive sorted values by Gumbel-max over log-weights, then a uniform
//!   point inside it).
//! * [`widened_exp_mech_median`]: the same sampler after pushing the lower
//!   half of the data down by `theta` and the upper half up by `theta`, which
//!   gives every output within `theta` of the median full utility.
//! * [`smooth_sens_median`]: the median plus Student's T noise scaled by the
//!   smooth sensitivity bound from [`smooth_sensitivity`].
//!
//! All three take a budget that is already the per-median share; splitting a
//! regression budget across the two predictions and across matchings is the
//! caller's job.

use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::estimators::median_sorted;
use crate::noise::{Gumbel, StudentsT, UniformInterval};
use crate::{Error, Result};

/// The interval `[lower, upper]` DP outputs are confined to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutputRange {
    pub lower: f64,
    pub upper: f64,
}

impl OutputRange {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        let r = Self { lower, upper };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lower.is_finite() && self.upper.is_finite() && self.lower < self.upper {
            Ok(())
        } else {
            Err(Error::InvalidRange {
                lower: self.lower,
                upper: self.upper,
            })
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.lower, self.upper)
    }
}

impl Default for OutputRange {
    fn default() -> Self {
        Self {
            lower: -0.5,
            upper: 1.5,
        }
    }
}

/// Parameters of the (optionally widened) exponential mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MedianMechParams {
    pub epsilon: f64,
    pub range: OutputRange,
    /// Widening; zero gives the plain mechanism.
    pub theta: f64,
}

impl MedianMechParams {
    pub fn new(epsilon: f64, range: OutputRange) -> Self {
        Self {
            epsilon,
            range,
            theta: 0.0,
        }
    }

    pub fn widened(epsilon: f64, range: OutputRange, theta: f64) -> Self {
        Self {
            epsilon,
            range,
            theta,
        }
    }

    fn validate(&self) -> Result<()> {
        self.range.validate()?;
        if !(self.epsilon > 0.0) || self.epsilon.is_nan() {
            return Err(Error::InvalidBudget(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        if !(self.theta >= 0.0 && self.theta.is_finite()) {
            return Err(Error::InvalidParameter(format!("theta must be >= 0, got {}", self.theta)));
        }
        Ok(())
    }
}

fn sorted_clipped(z: &[f64], range: &OutputRange) -> Result<Vec<f64>> {
    if z.is_empty() {
        return Err(Error::EmptyInput);
    }
    if z.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidValue("NaN in median input".into()));
    }
    let mut sorted: Vec<f64> = z.iter().map(|&v| range.clamp(v)).collect();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted)
}

/// Distance-from-median rank of gap `i` in a list of `len` points.
fn rank_distance(i: usize, len: usize) -> f64 {
    (i as f64 - len as f64 / 2.0).abs().ceil()
}

/// Unnormalized log-probability of each gap `[points[i-1], points[i]]`,
/// `i = 1..len`, with `-inf` for empty gaps. `points` must already include the
/// range endpoints.
pub fn interval_log_weights(points: &[f64], epsilon: f64) -> Vec<f64> {
    (1..points.len())
        .map(|i| {
            let width = points[i] - points[i - 1];
            if width > 0.0 {
                width.ln() - epsilon / 2.0 * rank_distance(i, points.len())
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect()
}

fn sample_gaps<R: Rng + ?Sized>(points: &[f64], epsilon: f64, rng: &mut R) -> Result<f64> {
    let mut best: Option<(usize, f64)> = None;
    for (offset, score) in interval_log_weights(points, epsilon).into_iter().enumerate() {
        if score == f64::NEG_INFINITY {
            continue;
        }
        let noisy = score + Gumbel.sample(rng);
        if best.is_none_or(|(_, b)| noisy > b) {
            best = Some((offset + 1, noisy));
        }
    }
    let (i, _) = best.ok_or(Error::InvalidRange {
        lower: points[0],
        upper: points[points.len() - 1],
    })?;
    Ok(UniformInterval::new(points[i - 1], points[i])?.sample(rng))
}

fn with_endpoints(mut sorted: Vec<f64>, range: &OutputRange) -> Vec<f64> {
    sorted.insert(0, range.lower);
    sorted.push(range.upper);
    sorted
}

/// Exponential-mechanism median; `params.theta` is ignored.
pub fn exp_mech_median<R: Rng + ?Sized>(
    z: &[f64],
    params: &MedianMechParams,
    rng: &mut R,
) -> Result<f64> {
    params.validate()?;
    let sorted = sorted_clipped(z, &params.range)?;
    sample_gaps(&with_endpoints(sorted, &params.range), params.epsilon, rng)
}

/// The points the widened mechanism samples gaps between, endpoints included.
pub fn widened_points(z: &[f64], params: &MedianMechParams) -> Result<Vec<f64>> {
    params.validate()?;
    let mut sorted = sorted_clipped(z, &params.range)?;
    if sorted.len() % 2 == 0 {
        let m = median_sorted(&sorted).expect("non-empty");
        sorted.insert(sorted.len() / 2, m);
    }
    let mid = sorted.len() / 2;
    let range = params.range;
    for v in &mut sorted[..mid] {
        *v = (*v - params.theta).max(range.lower);
    }
    for v in &mut sorted[mid + 1..] {
        *v = (*v + params.theta).min(range.upper);
    }
    Ok(with_endpoints(sorted, &range))
}

/// Exponential-mechanism median with the `theta`-widened utility.
pub fn widened_exp_mech_median<R: Rng + ?Sized>(
    z: &[f64],
    params: &MedianMechParams,
    rng: &mut R,
) -> Result<f64> {
    let points = widened_points(z, params)?;
    sample_gaps(&points, params.epsilon, rng)
}

/// 1-based index of the median used by the smooth sensitivity bound (lower
/// middle for even lengths).
pub fn smooth_median_index(len: usize) -> i64 {
    if len % 2 == 1 {
        (len as i64 + 1) / 2
    } else {
        len as i64 / 2
    }
}

/// Sorted values with out-of-range indices padded by the range endpoints.
struct Padded<'a> {
    z: &'a [f64],
    range: OutputRange,
}

impl Padded<'_> {
    fn at(&self, i: i64) -> f64 {
        if i < 1 {
            self.range.lower
        } else if i as usize > self.z.len() {
            self.range.upper
        } else {
            self.z[i as usize - 1]
        }
    }
}

/// `t`-smooth upper bound on the local sensitivity of the median when one
/// data record moves `k` of the sorted values in `z`.
///
/// `z` must be sorted and inside `range`. The maximum over the distance `l`
/// stops once `e^{-lt}` times the range width cannot beat the running
/// maximum, which leaves the result unchanged.
pub fn smooth_sensitivity(z: &[f64], k: usize, t: f64, range: &OutputRange) -> Result<f64> {
    if z.is_empty() {
        return Err(Error::EmptyInput);
    }
    if k == 0 || !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("need k >= 1 and t > 0, got k={k}, t={t}")));
    }
    range.validate()?;
    let padded = Padded { z, range: *range };
    let m = smooth_median_index(z.len());
    let k = k as i64;
    let mut best = (padded.at(m + k) - padded.at(m)).max(padded.at(m) - padded.at(m - k));
    for l in 1i64.. {
        let decay = (-(l as f64) * t).exp();
        if decay * range.width() <= best {
            break;
        }
        let w = k * (l + 1);
        let widest = (0..=w)
            .map(|s| padded.at(m + s) - padded.at(m - w + s))
            .fold(f64::NEG_INFINITY, f64::max);
        best = best.max(decay * widest);
        if w > z.len() as i64 {
            // The widest window is now range-wide; later terms only decay.
            break;
        }
    }
    Ok(best)
}

/// Parameters of the smooth-sensitivity Student's T median.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothSensParams {
    pub epsilon: f64,
    /// Number of estimates one data record can move.
    pub k: usize,
    /// Student's T degrees of freedom.
    pub dof: u32,
    /// Share of the budget spent on smoothing.
    pub beta: f64,
    pub range: OutputRange,
}

impl SmoothSensParams {
    pub fn new(epsilon: f64, k: usize, range: OutputRange) -> Self {
        Self {
            epsilon,
            k,
            dof: 3,
            beta: 0.5,
            range,
        }
    }

    /// Smoothing parameter `beta * epsilon / (d + 1)`.
    pub fn t(&self) -> f64 {
        self.beta * self.epsilon / (f64::from(self.dof) + 1.0)
    }

    /// Noise scale divisor `2 sqrt(d) (epsilon - t (d + 1)) / (d + 1)`.
    pub fn s(&self) -> f64 {
        let d1 = f64::from(self.dof) + 1.0;
        2.0 * f64::from(self.dof).sqrt() * (self.epsilon - self.t() * d1) / d1
    }

    fn validate(&self) -> Result<()> {
        self.range.validate()?;
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidBudget(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidParameter(format!("beta must be in (0, 1), got {}", self.beta)));
        }
        if self.dof == 0 || self.k == 0 {
            return Err(Error::InvalidParameter("d and k must be >= 1".into()));
        }
        Ok(())
    }
}

/// Median plus `(S / s) * T(d)` noise, clamped to the output range.
pub fn smooth_sens_median<R: Rng + ?Sized>(
    z: &[f64],
    params: &SmoothSensParams,
    rng: &mut R,
) -> Result<f64> {
    params.validate()?;
    let sorted = sorted_clipped(z, &params.range)?;
    let sens = smooth_sensitivity(&sorted, params.k, params.t(), &params.range)?;
    let noise = StudentsT::new(params.dof)?.sample(rng);
    let m = median_sorted(&sorted).expect("non-empty");
    Ok(params.range.clamp(m + sens / params.s() * noise))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RandomSeed;
    use proptest::collection::vec;
    use proptest::prelude::*;

    fn unit() -> OutputRange {
        OutputRange::new(0.0, 1.0).unwrap()
    }

    fn tv(p: &[f64], q: &[f64]) -> f64 {
        p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0
    }

    /// Frequencies of the gap each draw lands in.
    fn gap_frequencies(points: &[f64], draws: &[f64]) -> Vec<f64> {
        let mut counts = vec![0usize; points.len() - 1];
        for &d in draws {
            let i = points.partition_point(|&p| p <= d).clamp(1, points.len() - 1);
            counts[i - 1] += 1;
        }
        counts.iter().map(|&c| c as f64 / draws.len() as f64).collect()
    }

    #[test]
    fn two_point_weights() {
        let eps = 2.0;
        let params = MedianMechParams::new(eps, unit());
        let mut rng = RandomSeed::new(1).rng();
        let draws: Vec<f64> = (0..100_000)
            .map(|_| exp_mech_median(&[0.4, 0.6], &params, &mut rng).unwrap())
            .collect();
        let w = [0.4 * (-eps / 2.0f64).exp(), 0.2, 0.4 * (-eps / 2.0f64).exp()];
        let total: f64 = w.iter().sum();
        let expected: Vec<f64> = w.iter().map(|x| x / total).collect();
        let got = gap_frequencies(&[0.0, 0.4, 0.6, 1.0], &draws);
        assert!(tv(&expected, &got) < 0.02, "{expected:?} vs {got:?}");
    }

    #[test]
    fn huge_epsilon_hugs_the_median() {
        let params = MedianMechParams::new(1e6, unit());
        let z = [0.1, 0.2, 0.3, 0.4, 0.5];
        let mut rng = RandomSeed::new(2).rng();
        let inside = (0..10_000)
            .filter(|_| {
                let v = exp_mech_median(&z, &params, &mut rng).unwrap();
                (0.2..=0.4).contains(&v)
            })
            .count();
        assert!(inside as f64 / 1e4 >= 0.999);
    }

    #[test]
    fn identical_values_give_uniform_output() {
        let params = MedianMechParams::new(1.0, OutputRange::new(-0.5, 1.5).unwrap());
        let mut rng = RandomSeed::new(3).rng();
        let z = [0.5; 9];
        let m: f64 = (0..100_000)
            .map(|_| exp_mech_median(&z, &params, &mut rng).unwrap())
            .sum::<f64>()
            / 1e5;
        assert!((m - 0.5).abs() < 0.01);
    }

    #[test]
    fn empty_input_and_bad_range() {
        let mut rng = RandomSeed::new(0).rng();
        let p = MedianMechParams::new(1.0, unit());
        assert!(matches!(exp_mech_median(&[], &p, &mut rng), Err(Error::EmptyInput)));
        let bad = MedianMechParams::new(1.0, OutputRange { lower: 1.0, upper: 1.0 });
        assert!(matches!(
            exp_mech_median(&[0.5], &bad, &mut rng),
            Err(Error::InvalidRange { .. })
        ));
        assert!(matches!(
            widened_exp_mech_median(&[], &MedianMechParams::widened(1.0, unit(), 0.1), &mut rng),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn zero_widening_is_plain() {
        let z = [0.15, 0.3, 0.35, 0.6, 0.8];
        let plain = MedianMechParams::new(2.0, unit());
        let wide = MedianMechParams::widened(2.0, unit(), 0.0);
        let mut rng = RandomSeed::new(4).rng();
        let a: Vec<f64> = (0..100_000).map(|_| exp_mech_median(&z, &plain, &mut rng).unwrap()).collect();
        let b: Vec<f64> =
            (0..100_000).map(|_| widened_exp_mech_median(&z, &wide, &mut rng).unwrap()).collect();
        let points = [0.0, 0.15, 0.3, 0.35, 0.6, 0.8, 1.0];
        assert!(tv(&gap_frequencies(&points, &a), &gap_frequencies(&points, &b)) < 0.01);
    }

    #[test]
    fn widening_concentrates_mass() {
        let z = [0.5; 20];
        let mut rng = RandomSeed::new(5).rng();
        let near = |v: f64| (0.4..=0.6).contains(&v);
        let wide = MedianMechParams::widened(2.0, unit(), 0.1);
        let plain = MedianMechParams::new(2.0, unit());
        let wide_mass = (0..100_000)
            .filter(|_| near(widened_exp_mech_median(&z, &wide, &mut rng).unwrap()))
            .count();
        let plain_mass =
            (0..100_000).filter(|_| near(exp_mech_median(&z, &plain, &mut rng).unwrap())).count();
        assert!(wide_mass > plain_mass);
    }

    #[test]
    fn widened_points_shape() {
        let p = MedianMechParams::widened(1.0, unit(), 0.1);
        let pts = widened_points(&[0.5; 4], &p).unwrap();
        assert_eq!(pts.len(), 7);
        assert!((pts[1] - 0.4).abs() < 1e-12 && (pts[3] - 0.5).abs() < 1e-12);
        assert!((pts[5] - 0.6).abs() < 1e-12);
        let clamped = widened_points(&[0.0, 0.05, 0.95, 1.0, 0.5], &p).unwrap();
        assert!(clamped.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    fn padded(z: &[f64], i: i64, r: &OutputRange) -> f64 {
        if i < 1 {
            r.lower
        } else if i as usize > z.len() {
            r.upper
        } else {
            z[i as usize - 1]
        }
    }

    /// Largest move of the median when `k` sorted values are pushed to an end
    /// of the range, found by editing and re-sorting.
    fn local_sensitivity_brute(z: &[f64], k: usize, r: &OutputRange) -> f64 {
        let m = smooth_median_index(z.len()) as usize - 1;
        let base = z[m];
        let mut best = 0.0f64;
        for target in [r.lower, r.upper] {
            let mut edited = z.to_vec();
            let idx: Vec<usize> = if target == r.upper {
                (0..k.min(z.len())).collect()
            } else {
                (z.len().saturating_sub(k)..z.len()).collect()
            };
            for i in idx {
                edited[i] = target;
            }
            edited.sort_by(f64::total_cmp);
            best = best.max((edited[m] - base).abs());
        }
        best
    }

    /// Unpruned maximum over every distance up to full padding.
    fn smooth_sensitivity_oracle(z: &[f64], k: usize, t: f64, r: &OutputRange) -> f64 {
        let m = smooth_median_index(z.len());
        let k = k as i64;
        let mut best = local_sensitivity_brute(z, k as usize, r);
        for l in 1..=(z.len() as i64 + 2) {
            let w = k * (l + 1);
            let widest = (0..=w)
                .map(|s| padded(z, m + s, r) - padded(z, m - w + s, r))
                .fold(f64::NEG_INFINITY, f64::max);
            best = best.max((-(l as f64) * t).exp() * widest);
        }
        best
    }

    fn sorted_grid(raw: &[u8]) -> Vec<f64> {
        let mut z: Vec<f64> = raw.iter().map(|&v| f64::from(v % 21) / 20.0).collect();
        z.sort_by(f64::total_cmp);
        z
    }

    #[test]
    fn smooth_sensitivity_concentrated() {
        // m = 6 of 11; first nonzero window at l = 5 (w = 6 reaches index 0).
        let z = [0.5; 11];
        let s = smooth_sensitivity(&z, 1, 1.0, &unit()).unwrap();
        assert_eq!(s, (-5.0f64).exp() * 0.5);
        assert_eq!(s, smooth_sensitivity_oracle(&z, 1, 1.0, &unit()));
    }

    proptest! {
        #[test]
        fn smooth_sensitivity_matches_oracle(
            raw in vec(any::<u8>(), 1..30),
            k in 1usize..5,
            t in 0.01f64..3.0,
        ) {
            let z = sorted_grid(&raw);
            let fast = smooth_sensitivity(&z, k, t, &unit()).unwrap();
            prop_assert_eq!(fast, smooth_sensitivity_oracle(&z, k, t, &unit()));
            prop_assert!(fast >= local_sensitivity_brute(&z, k, &unit()));
        }

        #[test]
        fn smooth_sensitivity_is_smooth(
            raw in vec(any::<u8>(), 2..30),
            edits in vec((any::<usize>(), any::<u8>()), 1..5),
            t in 0.01f64..3.0,
        ) {
            let k = edits.len();
            let z = sorted_grid(&raw);
            let mut neighbour = raw.clone();
            for (i, v) in &edits {
                let len = neighbour.len();
                neighbour[i % len] = *v;
            }
            let z2 = sorted_grid(&neighbour);
            let a = smooth_sensitivity(&z, k, t, &unit()).unwrap();
            let b = smooth_sensitivity(&z2, k, t, &unit()).unwrap();
            prop_assert!(a <= t.exp() * b * (1.0 + 1e-12), "{} > e^t {}", a, b);
        }
    }

    #[test]
    fn smooth_params_defaults() {
        let p = SmoothSensParams::new(2.0, 1, unit());
        assert_eq!((p.dof, p.beta), (3, 0.5));
        assert!((p.t() - 2.0 / (2.0 * 4.0)).abs() < 1e-15);
        assert!((p.s() - 2.0 * 3f64.sqrt() / 4.0).abs() < 1e-15);
    }

    #[test]
    fn smooth_median_converges_with_epsilon() {
        let z = [0.2, 0.3, 0.35, 0.4, 0.41, 0.5, 0.9];
        let p = SmoothSensParams::new(1e6, 1, unit());
        let mut rng = RandomSeed::new(6).rng();
        let close = (0..10_000)
            .filter(|_| (smooth_sens_median(&z, &p, &mut rng).unwrap() - 0.4).abs() < 1e-3)
            .count();
        assert!(close as f64 / 1e4 >= 0.999);
    }

    #[test]
    fn smooth_median_scale() {
        // Centered input: the output is median + (S / s) T(3).
        let z: Vec<f64> = (0..21).map(|i| 0.3 + 0.02 * i as f64).collect();
        let p = SmoothSensParams::new(1.0, 1, unit());
        let sens = smooth_sensitivity(&z, 1, p.t(), &p.range).unwrap();
        let scale = sens / p.s();
        let mut rng = RandomSeed::new(7).rng();
        let mut dev: Vec<f64> = (0..100_000)
            .map(|_| (smooth_sens_median(&z, &p, &mut rng).unwrap() - 0.5).abs())
            .collect();
        dev.sort_by(f64::total_cmp);
        // Median of |T(3)| is its 75% quantile, 0.764892.
        let empirical = dev[50_000] / 0.764_892;
        assert!((empirical - scale).abs() / scale < 0.05, "{empirical} vs {scale}");
    }

    #[test]
    fn outputs_stay_in_range() {
        let range = OutputRange::new(-0.5, 1.5).unwrap();
        let z = [1.4, 1.45, 1.5, 1.49, -0.4];
        let mut rng = RandomSeed::new(8).rng();
        for _ in 0..2000 {
            let a = exp_mech_median(&z, &MedianMechParams::new(0.1, range), &mut rng).unwrap();
            let b = widened_exp_mech_median(&z, &MedianMechParams::widened(0.1, range, 0.3), &mut rng)
                .unwrap();
            let c = smooth_sens_median(&z, &SmoothSensParams::new(0.1, 2, range), &mut rng).unwrap();
            for v in [a, b, c] {
                assert!((range.lower..=range.upper).contains(&v));
            }
        }
    }
}
