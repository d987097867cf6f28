//! A complete experiment from a JSON config, as the `dpslr` binary runs it.

use dpslr::experiment::{fit_results, ledger_report, run_fit, ExperimentConfig};

fn main() -> dpslr::Result<()> {
    let out = std::env::temp_dir().join("dpslr-example");
    let mut config = ExperimentConfig::from_json(
        r#"{
          "input": {"synthetic": {"spec": {"n": 400}, "datasets": 3}},
          "algorithms": [
            {"name": "ols"},
            {"name": "noisy_stats"},
            {"name": "dp_exp_theilsen", "k": 10},
            {"name": "dpgd_approx"}
          ],
          "epsilons": [1, 8],
          "trials": 40,
          "seed": 42,
          "header_timestamp": false
        }"#,
    )?;
    config.out = out.clone();

    print!("{}", ledger_report(&config)?);
    let results = fit_results(&config)?;
    println!("{} trials across {} reports", results.rows.len(), results.reports.len());
    for f in run_fit(&config)? {
        println!("wrote {}", f.display());
    }
    Ok(())
}
