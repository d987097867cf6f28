use dpslr::noise::{Exponential, Gaussian, Gumbel, Laplace, StudentsT, UniformInterval};
use dpslr::RandomSeed;
use rand::distr::Distribution;
use statrs::distribution::{self as sd, ChiSquared, ContinuousCDF};

const N: usize = 200_000;

fn draws<D: Distribution<f64>>(d: &D, label: &str) -> Vec<f64> {
    let mut rng = RandomSeed::new(2024).derive_str(label).rng();
    let mut v: Vec<f64> = (0..N).map(|_| d.sample(&mut rng)).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Kolmogorov-Smirnov statistic against a reference CDF.
fn ks(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Pearson chi-square over 50 equiprobable bins of the reference.
fn chi_square(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let bins = 50;
    let mut counts = vec![0usize; bins];
    for &x in sorted {
        counts[((cdf(x) * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let expected = sorted.len() as f64 / bins as f64;
    counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum()
}

fn check(name: &str, sorted: &[f64], cdf: impl Fn(f64) -> f64 + Copy) {
    // 1% critical values; each check uses a fixed stream.
    let d = ks(sorted, cdf);
    let ks_crit = 1.628 / (sorted.len() as f64).sqrt();
    assert!(d < ks_crit, "{name}: KS statistic {d} >= {ks_crit}");
    let chi = chi_square(sorted, cdf);
    let chi_crit = ChiSquared::new(49.0).unwrap().inverse_cdf(0.99);
    assert!(chi < chi_crit, "{name}: chi-square {chi} >= {chi_crit}");
}

#[test]
fn laplace_matches_reference() {
    for (loc, scale) in [(0.0, 1.0), (0.3, 0.02), (-5.0, 40.0)] {
        let r = sd::Laplace::new(loc, scale).unwrap();
        check("laplace", &draws(&Laplace::new(loc, scale).unwrap(), &format!("lap{scale}")), |x| r.cdf(x));
    }
}

#[test]
fn gumbel_matches_reference() {
    let r = sd::Gumbel::new(0.0, 1.0).unwrap();
    check("gumbel", &draws(&Gumbel, "gumbel"), |x| r.cdf(x));
}

#[test]
fn students_t_matches_reference() {
    for dof in [1, 3, 10] {
        let r = sd::StudentsT::new(0.0, 1.0, dof as f64).unwrap();
        check("t", &draws(&StudentsT::new(dof).unwrap(), &format!("t{dof}")), |x| r.cdf(x));
    }
}

#[test]
fn gaussian_matches_reference() {
    let r = sd::Normal::new(1.5, 0.25).unwrap();
    check("normal", &draws(&Gaussian::new(1.5, 0.25).unwrap(), "normal"), |x| r.cdf(x));
}

#[test]
fn exponential_matches_reference() {
    let r = sd::Exp::new(1.0 / 52.0).unwrap();
    check("exp", &draws(&Exponential::new(52.0).unwrap(), "exp"), |x| r.cdf(x));
}

#[test]
fn uniform_matches_reference() {
    let r = sd::Uniform::new(-0.5, 1.5).unwrap();
    check("uniform", &draws(&UniformInterval::new(-0.5, 1.5).unwrap(), "unif"), |x| r.cdf(x));
}

#[test]
fn the_checks_reject_a_wrong_scale() {
    let r = sd::Laplace::new(0.0, 1.0).unwrap();
    let sample = draws(&Laplace::centered(1.05).unwrap(), "wrong");
    assert!(ks(&sample, |x| r.cdf(x)) > 1.628 / (N as f64).sqrt());
}
