//! Empirical error bounds over repeated trials and their ratio to the OLS
//! standard error, across many datasets.

use dpslr::datagen::{gen_synthetic, SyntheticSpec};
use dpslr::dp_regression::noisy_stats;
use dpslr::experiment::{ols_outcome, standard_error_at};
use dpslr::metrics::{empirical_error_bound, ratio_cdf, Reference, TrialReport, Which};
use dpslr::RandomSeed;

fn main() -> dpslr::Result<()> {
    let spec = SyntheticSpec { n: 500, ..Default::default() };
    let mut reports = Vec::new();
    for i in 0..50 {
        let data = gen_synthetic(&spec, &mut RandomSeed::new(1).derive(i).rng())?;
        let mut rng = RandomSeed::new(2).derive(i).rng();
        let trials = (0..100)
            .map(|_| noisy_stats(&data.dataset, 1.0, &mut rng).map(|r| r.value.result))
            .collect::<dpslr::Result<Vec<_>>>()?;
        reports.push(TrialReport {
            dataset_id: format!("d{i}"),
            algorithm: "noisy_stats".into(),
            trials,
            ols_baseline: ols_outcome(&data.dataset).prediction().expect("x varies"),
            sigma_hat: (standard_error_at(&data.dataset, 0.25), standard_error_at(&data.dataset, 0.75)),
            truth: Some(data.truth),
        });
    }
    let first = &reports[0];
    println!(
        "dataset d0: C(68) vs ols {:.4}, vs truth {:.4}, sigma {:.4}",
        empirical_error_bound(first, 68.0, Which::P25, Reference::Ols)?,
        empirical_error_bound(first, 68.0, Which::P25, Reference::Truth)?,
        first.sigma(Which::P25)
    );
    let cdf = ratio_cdf(&reports, 68.0, Which::P25, Reference::Ols)?;
    println!("median ratio {:.3}; {:.0}% of datasets below 1", cdf.median().unwrap_or(f64::NAN), 100.0 * cdf.at(1.0));
    Ok(())
}
