//! The seeded samplers behind every mechanism.

use dpslr::noise::{Exponential, Gaussian, Gumbel, Laplace, StudentsT, UniformInterval};
use dpslr::RandomSeed;
use rand::distr::Distribution;

fn summary(name: &str, draws: &[f64]) {
    let n = draws.len() as f64;
    let mean = draws.iter().sum::<f64>() / n;
    let var = draws.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    println!("{name:>12}: mean {mean:+.4}, variance {var:.4}");
}

fn main() -> dpslr::Result<()> {
    let mut rng = RandomSeed::new(1).rng();
    let n = 100_000;
    let draw = |d: &dyn Fn(&mut dpslr::SeedStream) -> f64, rng: &mut dpslr::SeedStream| (0..n).map(|_| d(rng)).collect::<Vec<_>>();

    let lap = Laplace::centered(0.5)?;
    summary("laplace(0.5)", &draw(&|r| lap.sample(r), &mut rng));
    summary("gumbel", &draw(&|r| Gumbel.sample(r), &mut rng));
    let t = StudentsT::new(3)?;
    summary("t(3)", &draw(&|r| t.sample(r), &mut rng));
    let g = Gaussian::new(0.0, 2.0)?;
    summary("normal(0,2)", &draw(&|r| g.sample(r), &mut rng));
    let e = Exponential::new(52.0)?;
    summary("exp(52)", &draw(&|r| e.sample(r), &mut rng));
    let u = UniformInterval::new(-1.0, 3.0)?;
    summary("uniform", &draw(&|r| u.sample(r), &mut rng));

    // Same seed, same stream.
    let a: f64 = lap.sample(&mut RandomSeed::new(9).derive_str("x").rng());
    let b: f64 = lap.sample(&mut RandomSeed::new(9).derive_str("x").rng());
    assert_eq!(a, b);
    Ok(())
}
